"""Acceptance gate: every exit criterion at its stated tolerance.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one PASS/FAIL
line per criterion. The stochastic criterion uses a frozen seed, so the
whole gate is deterministic.
"""

import math
import time

import numpy as np
import pytest

from tmopo.cli import main
from tmopo.hg_modes import HGMode
from tmopo.langevin import SimConfig, simulate_joint_spectra
from tmopo.opo_model import (
    CavityParams,
    EfficiencyChain,
    enhancement_percent,
    infer_source_inseparability,
    inseparability,
    inseparability_from_db,
    reduction_percent,
    threshold,
)
from tmopo.overlap import PumpSuperposition, coupling_coefficient, default_pump_waist
from tmopo.pump_optimizer import competing_mode_analysis, optimize_pump

SIGNAL = HGMode(1, 0, 1.0)
FUNDAMENTAL = HGMode(0, 0, 1.0)
PUMP_WAIST = default_pump_waist(1.0)
IDEAL = EfficiencyChain()
EXP_EFF = EfficiencyChain.from_totals(0.65, 0.79)
PARAMS = CavityParams(gamma_s=0.03, mu=0.008, tau=1.0 / 2.4e9, chi=1.0)

# frozen acceptance configuration for the stochastic criterion
GRID_SEED = 2025
GRID_TRAJECTORIES = 32
GRID_SEGMENTS = 50
GRID_SEGMENT_LIFETIMES = 300.0
LOSSLESS = CavityParams(gamma_s=0.03, mu=0.0, tau=1.0 / 2.4e9, chi=1.0)


def _report(number: int, ok: bool, text: str):
    print(f"{'PASS' if ok else 'FAIL'} criterion {number}: {text}")
    assert ok, f"criterion {number}: {text}"


def test_criterion_1_coupling_fixtures():
    start = time.perf_counter()
    g00 = coupling_coefficient(
        PumpSuperposition.pure(0, PUMP_WAIST), FUNDAMENTAL, FUNDAMENTAL
    ).gamma
    g0 = coupling_coefficient(PumpSuperposition.pure(0, PUMP_WAIST), SIGNAL, SIGNAL).gamma
    g2 = coupling_coefficient(PumpSuperposition.pure(2, PUMP_WAIST), SIGNAL, SIGNAL).gamma
    odd = [
        coupling_coefficient(PumpSuperposition.pure(n, PUMP_WAIST), SIGNAL, SIGNAL).gamma
        for n in (1, 3, 5)
    ]
    elapsed = time.perf_counter() - start

    errors = [
        abs(g00 - 1.0),
        abs(g0 - 0.5),
        abs(g2 - 1.0 / math.sqrt(2.0)),
        *[abs(g) for g in odd],
    ]
    ok = max(errors) <= 1e-9 and elapsed < 1.0
    _report(
        1,
        ok,
        f"quadrature couplings 1, 1/2, 1/sqrt(2), odd->0 "
        f"(max |err| = {max(errors):.2e}, {elapsed:.2f} s)",
    )


def test_criterion_2_optimal_pump():
    start = time.perf_counter()
    result = optimize_pump(SIGNAL, SIGNAL, range(7))
    coeffs = result.pump.coefficients
    errors = [
        abs(coeffs[0] ** 2 - 1.0 / 3.0),
        abs(coeffs[2] ** 2 - 2.0 / 3.0),
        abs(result.gamma_max - math.sqrt(3.0) / 2.0),
    ]
    rng = np.random.default_rng(31415)
    samples = rng.normal(size=(10_000, len(result.per_order)))
    samples /= np.linalg.norm(samples, axis=1, keepdims=True)
    best_random = float(np.max(samples @ np.array(result.per_order)))
    elapsed = time.perf_counter() - start

    ok = (
        max(errors) <= 1e-9
        and best_random <= result.gamma_max + 1e-9
        and elapsed < 5.0
    )
    _report(
        2,
        ok,
        f"optimal pump c0^2=1/3, c2^2=2/3, gamma_max=sqrt(3)/2 "
        f"(max |err| = {max(errors):.2e}); 10^4 random pumps stay below "
        f"gamma_max (best {best_random:.9f}); {elapsed:.2f} s",
    )


def test_criterion_3_threshold_ratios(capsys):
    p_ref = threshold(PARAMS, 1.0)
    ratios = [
        threshold(PARAMS, 0.5) / p_ref,
        threshold(PARAMS, 1.0 / math.sqrt(2.0)) / p_ref,
        threshold(PARAMS, math.sqrt(3.0) / 2.0) / p_ref,
    ]
    ratio_errors = [
        abs(ratios[0] - 4.0),
        abs(ratios[1] - 2.0),
        abs(ratios[2] - 4.0 / 3.0),
    ]

    code = main(["threshold"])
    out = capsys.readouterr().out
    values = {}
    for line in out.splitlines():
        parts = line.split()
        if parts and parts[0] in ("hg00", "hg20", "optimal"):
            values[parts[0]] = float(parts[2])
    exact = (
        values["hg00"] == 2040.0
        and values["hg20"] == 1020.0
        and values["optimal"] == 680.0
    )
    ok = code == 0 and max(ratio_errors) <= 1e-12 and exact
    _report(
        3,
        ok,
        f"threshold ratios 4, 2, 4/3 (max |err| = {max(ratio_errors):.2e}); "
        f"absolute 2040/1020/680 mW exact from 510 mW",
    )


def test_criterion_4_ideal_curve_endpoints():
    v_quarter = inseparability(0.25, 0.0, IDEAL)
    err = abs(v_quarter - 2.0 / 9.0)
    # approach to threshold for the pumps that can reach it
    tail = [inseparability(1.0 - eps, 0.0, IDEAL) for eps in (1e-2, 1e-4, 1e-6)]
    decreasing = tail[0] > tail[1] > tail[2]
    ok = err <= 1e-9 and decreasing and tail[-1] < 1e-12
    _report(
        4,
        ok,
        f"ideal V(p=p_th^00->00, hg00 pump) = 2/9 (|err| = {err:.2e}); "
        f"V -> 0 at threshold (V(1-1e-6) = {tail[-1]:.2e})",
    )


def test_criterion_5_experimental_replication():
    points = [
        (500.0 / 2040.0, 1.13),
        (670.0 / 1020.0, 1.04),
        (670.0 / 680.0, 0.98),
    ]
    formula_gap = 0.0
    measured_gap = 0.0
    for ratio, measured in points:
        v = inseparability(ratio, 0.18, EXP_EFF)
        # independent evaluation of the same spectrum formula
        root = math.sqrt(ratio)
        direct = 2.0 - 0.65 * 0.79 * 8.0 * root / ((1.0 + root) ** 2 + 0.18**2)
        formula_gap = max(formula_gap, abs(v - direct))
        measured_gap = max(measured_gap, abs(v - measured))
    ok = formula_gap <= 1e-14 and measured_gap <= 0.08
    _report(
        5,
        ok,
        f"predicted V matches the spectrum formula exactly (gap {formula_gap:.1e}) "
        f"and sits within 0.08 of the measured 1.13/1.04/0.98 "
        f"(max gap {measured_gap:.3f})",
    )


def test_criterion_6_db_pipeline():
    v_meas = [
        inseparability_from_db(2.36, 2.56),
        inseparability_from_db(2.92, 2.76),
        inseparability_from_db(3.28, 2.92),
    ]
    v_errors = [
        abs(v_meas[0] - 1.135),
        abs(v_meas[1] - 1.041),
        abs(v_meas[2] - 0.981),
    ]
    corrected = [infer_source_inseparability(v, 0.65) for v in v_meas]
    c_errors = [
        abs(corrected[0] - 0.66),
        abs(corrected[1] - 0.52),
        abs(corrected[2] - 0.43),
    ]
    gain = enhancement_percent(0.66, 0.43)
    cut = reduction_percent(2040.0, 680.0)
    ok = (
        max(v_errors) <= 0.005
        and max(c_errors) <= 0.01
        and abs(gain - 53.5) <= 1.0
        and abs(cut - 66.7) <= 0.1
    )
    _report(
        6,
        ok,
        f"dB chain V = {v_meas[0]:.4f}/{v_meas[1]:.4f}/{v_meas[2]:.4f}, "
        f"corrected {corrected[0]:.3f}/{corrected[1]:.3f}/{corrected[2]:.3f}, "
        f"enhancement {gain:.1f}%, threshold reduction {cut:.1f}%",
    )


def test_criterion_7_langevin_oracle():
    def analytic(sigma, omega):
        return 1.0 - 4.0 * sigma / ((1.0 + sigma) ** 2 + omega**2)

    # warm the jitted kernel outside the timed window
    warm = SimConfig.from_segments(
        LOSSLESS, 1, pump_ratio=0.0, seed=0, n_trajectories=2,
        segment_lifetimes=20.0, transient_lifetimes=0.0,
    )
    simulate_joint_spectra(warm, 0.0)

    start = time.perf_counter()
    worst_rel = 0.0
    worst_point = None
    product_ok = True
    for sigma in (0.3, 0.5, 0.7, 0.9):
        for omega in (0.0, 0.18, 1.0, 3.0):
            config = SimConfig.from_segments(
                LOSSLESS,
                GRID_SEGMENTS,
                pump_ratio=sigma**2,
                seed=GRID_SEED,
                n_trajectories=GRID_TRAJECTORIES,
                segment_lifetimes=GRID_SEGMENT_LIFETIMES,
            )
            spectra = simulate_joint_spectra(config, omega)
            sq = spectra.squeezed
            expected = analytic(sigma, omega)
            bound = max(0.05 * expected, 3.0 * sq.std_error)
            gap = abs(sq.v_estimate - expected)
            assert gap <= bound, (
                f"sigma={sigma} omega={omega}: |{sq.v_estimate:.5f} - "
                f"{expected:.5f}| = {gap:.2e} > {bound:.2e}"
            )
            if gap / expected > worst_rel:
                worst_rel, worst_point = gap / expected, (sigma, omega)

            anti = spectra.antisqueezed
            product = sq.v_estimate * anti.v_estimate
            rel_err = math.hypot(
                sq.std_error / sq.v_estimate, anti.std_error / anti.v_estimate
            )
            if product < 1.0 - 3.0 * rel_err * product:
                product_ok = False

    shot_cfg = SimConfig.from_segments(
        LOSSLESS,
        GRID_SEGMENTS,
        pump_ratio=0.0,
        seed=GRID_SEED,
        n_trajectories=GRID_TRAJECTORIES,
        segment_lifetimes=GRID_SEGMENT_LIFETIMES,
    )
    shot = simulate_joint_spectra(shot_cfg, 0.18).squeezed
    shot_ok = abs(shot.v_estimate - 1.0) <= 3.0 * shot.std_error
    elapsed = time.perf_counter() - start

    ok = product_ok and shot_ok and elapsed < 300.0
    _report(
        7,
        ok,
        f"Langevin grid matches the analytic spectrum (worst rel gap "
        f"{100 * worst_rel:.1f}% at {worst_point}); shot noise "
        f"{shot.v_estimate:.4f} +- {shot.std_error:.4f}; uncertainty product "
        f">= 1 everywhere; {elapsed:.0f} s",
    )


def test_criterion_8_competition_guard():
    hg00_report = competing_mode_analysis(
        PumpSuperposition.pure(0, PUMP_WAIST), SIGNAL, [FUNDAMENTAL], PARAMS
    )
    cap_err = abs(hg00_report.achievable_pump_ratio - 0.25)
    sigma_err = abs(math.sqrt(hg00_report.achievable_pump_ratio) - 0.5)

    optimal = optimize_pump(SIGNAL, SIGNAL, range(7))
    opt_report = competing_mode_analysis(
        optimal.pump, SIGNAL, [FUNDAMENTAL], PARAMS
    )
    p_ref = threshold(PARAMS, 1.0)
    hg00_power = (
        opt_report.coupled_power_fraction[(0, 0)] * opt_report.target_threshold
    )
    power_err = abs(hg00_power - 4.0 / 9.0 * p_ref)
    ok = (
        cap_err <= 1e-12
        and sigma_err <= 1e-12
        and power_err <= 1e-12 * p_ref
        and hg00_power < p_ref
        and opt_report.first_oscillator == (1, 0)
    )
    _report(
        8,
        ok,
        f"hg00 pump caps p/p_th at 0.25 (err {cap_err:.1e}); optimal pump's "
        f"HG00 component reaches only (4/9) p_th^00->00 at the target "
        f"threshold (err {power_err / p_ref:.1e}), so the target oscillates first",
    )


def test_criterion_9_determinism(tmp_path, capsys):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("cavity.mu = 0.0\n")

    sweep_files = [tmp_path / "sweep_a.csv", tmp_path / "sweep_b.csv"]
    for path in sweep_files:
        code = main(["sweep", "--config", str(cfg), "--pmin", "0",
                     "--pmax", "650", "--step", "13", "--csv", str(path)])
        assert code == 0
    capsys.readouterr()
    sweep_same = sweep_files[0].read_bytes() == sweep_files[1].read_bytes()

    sim_files = [tmp_path / "sim_a.csv", tmp_path / "sim_b.csv"]
    for path in sim_files:
        code = main(["simulate", "--sigma", "0.6", "--omega", "0.18",
                     "--seed", "11", "--config", str(cfg), "--csv", str(path),
                     "--trajectories", "4", "--segments", "8",
                     "--segment-lifetimes", "50"])
        assert code in (0, 1)  # determinism is what is under test here
    capsys.readouterr()
    sim_same = sim_files[0].read_bytes() == sim_files[1].read_bytes()

    ok = sweep_same and sim_same
    _report(9, ok, "sweep and simulate CSVs are byte-identical across reruns")
