"""Command-line front end.

Subcommands:
  gamma      coupling coefficients of a pump mode to a signal mode
  threshold  absolute oscillation thresholds per pump mode
  optimize   best pump superposition for a target signal mode
  sweep      inseparability vs pump power (CSV), with oscillation flags
  insep      measured dB noise powers -> inseparability (+ loss-corrected)
  simulate   stochastic Langevin run checked against the analytic spectrum

Exit codes: 0 success, 1 runtime/physics error, 2 usage or config error.
CSV output is deterministic for a given config and seed.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from .config import (
    ConfigError,
    ExperimentConfig,
    load_config,
    normalize_coefficients,
    parse_pump_mode,
)
from .hg_modes import HGMode
from .langevin import (
    ConvergenceError,
    NumericalInstabilityError,
    SimConfig,
    simulate_joint_spectra,
)
from .opo_model import (
    AboveThresholdError,
    EfficiencyChain,
    NoOscillationError,
    UnphysicalInputError,
    enhancement_percent,
    infer_source_inseparability,
    inseparability,
    inseparability_from_db,
    squeezed_variance,
)
from .overlap import (
    PumpSuperposition,
    QuadratureError,
    coupling_coefficient,
    default_pump_waist,
)
from .pump_optimizer import NoCouplingError, optimize_pump

TARGET_SIGNAL = (1, 0)
OPTIMAL_BASIS = range(0, 7)
SIM_TOLERANCE = 0.05

# threshold ratios p_th(pump -> HG10) / p_th(00 -> 00) for the canonical
# pump modes, kept as exact integer fractions so mW values come out of
# exact arithmetic; the same numbers are reproduced by quadrature to 1e-9
# in the test suite. "safe" is the competing HG00-signal threshold under
# that pump (None: the pump does not couple to HG00 at all).
_CANONICAL_CURVES = {
    "hg00": {"ratio": (4, 1), "safe": (1, 1)},
    "hg20": {"ratio": (2, 1), "safe": None},
    "optimal": {"ratio": (4, 3), "safe": (3, 1)},
}
_CANONICAL_GAMMA = {
    "hg00": 0.5,
    "hg20": 1.0 / math.sqrt(2.0),
    "optimal": math.sqrt(3.0) / 2.0,
}


class UsageError(ValueError):
    """Bad command usage detected after argparse (exit code 2)."""


def _fmt(value: float) -> str:
    return f"{value:.6g}"


def _write_csv(path: str | None, header: list[str], rows: list[list[str]]) -> None:
    text = "\n".join([",".join(header)] + [",".join(row) for row in rows]) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, newline="")


def _parse_signal(text: str) -> HGMode:
    text = text.strip()
    if len(text) != 2 or not text.isdigit():
        raise UsageError(f"signal mode must be two digits like '10', got {text!r}")
    return HGMode(int(text[0]), int(text[1]), 1.0)


def _build_pump(mode: str, coeffs, signal: HGMode) -> PumpSuperposition:
    basis_waist = default_pump_waist(signal.waist)
    if mode == "hg00":
        return PumpSuperposition.pure(0, basis_waist)
    if mode == "hg20":
        return PumpSuperposition.pure(2, basis_waist)
    if mode == "optimal":
        return optimize_pump(signal, signal, OPTIMAL_BASIS, basis_waist).pump
    if mode == "custom":
        return PumpSuperposition(normalize_coefficients(tuple(coeffs)), basis_waist)
    raise UsageError(f"unknown pump mode {mode!r}")


def _pump_arg(text: str):
    try:
        return parse_pump_mode(text)
    except ConfigError as exc:
        raise UsageError(str(exc)) from None


def cmd_gamma(args) -> int:
    signal = _parse_signal(args.signal)
    mode, coeffs = _pump_arg(args.pump)
    pump = _build_pump(mode, coeffs, signal)
    result = coupling_coefficient(pump, signal, signal)

    print(f"pump: {args.pump}   signal = idler: HG{signal.n}{signal.m}")
    print("order  coefficient  gamma_n      contribution")
    rows = []
    for n, (c, g) in enumerate(zip(pump.coefficients, result.per_order)):
        print(f"{n:<6d} {c:>11.6f}  {g:>11.6f}  {c * g:>12.6f}")
        rows.append([str(n), _fmt(c), _fmt(g), _fmt(c * g)])
    print(f"gamma = {result.gamma:.5f}")
    if args.csv:
        _write_csv(args.csv, ["order", "coefficient", "gamma_n", "contribution"], rows)
    return 0


def _threshold_mw(reference_mw: float, mode: str, pump, signal) -> float:
    curve = _CANONICAL_CURVES.get(mode)
    if curve is not None and (signal.n, signal.m) == TARGET_SIGNAL:
        num, den = curve["ratio"]
        return reference_mw * num / den
    gamma = coupling_coefficient(pump, signal, signal).gamma
    if abs(gamma) <= 1e-12:
        raise NoOscillationError(
            f"pump {mode!r} does not couple to HG{signal.n}{signal.m}"
        )
    return reference_mw / gamma**2


def cmd_threshold(args) -> int:
    cfg = load_config(args.config)
    signal = _parse_signal(args.signal)
    print(f"reference threshold p_th(00->00) = {_fmt(cfg.reference_threshold_mw)} mW")
    print(f"signal mode: HG{signal.n}{signal.m}")
    print("pump      gamma     p_th_mW")
    modes = ["hg00", "hg20", "optimal"]
    if cfg.pump_mode == "custom":
        modes.append("custom")
    for mode in modes:
        pump = _build_pump(mode, cfg.custom_coefficients, signal)
        if mode in _CANONICAL_GAMMA and (signal.n, signal.m) == TARGET_SIGNAL:
            gamma = _CANONICAL_GAMMA[mode]
        else:
            gamma = coupling_coefficient(pump, signal, signal).gamma
        try:
            p_th = _threshold_mw(cfg.reference_threshold_mw, mode, pump, signal)
        except NoOscillationError:
            print(f"{mode:<9s} {gamma:.5f}   -  (no coupling, never oscillates)")
            continue
        print(f"{mode:<9s} {gamma:.5f}   {_fmt(p_th)}")
    return 0


def _parse_orders(text: str) -> list[int]:
    text = text.strip()
    if "-" in text and "," not in text:
        lo, _, hi = text.partition("-")
        try:
            return list(range(int(lo), int(hi) + 1))
        except ValueError:
            raise UsageError(f"bad order range {text!r}") from None
    try:
        return [int(tok) for tok in text.split(",")]
    except ValueError:
        raise UsageError(f"bad order list {text!r}") from None


def cmd_optimize(args) -> int:
    cfg = load_config(args.config)
    signal = _parse_signal(args.signal)
    orders = _parse_orders(args.orders)
    result = optimize_pump(signal, signal, orders)
    print(f"optimal pump for signal HG{signal.n}{signal.m} over orders {orders}:")
    print("order  coefficient  gamma_n")
    for n, (c, g) in enumerate(zip(result.pump.coefficients, result.per_order)):
        print(f"{n:<6d} {c:>11.6f}  {g:>11.6f}")
    print(f"gamma_max = {result.gamma_max:.6f}")
    print(f"threshold ratio vs 00->00 = {_fmt(result.threshold_ratio)}")
    print(
        f"threshold = {_fmt(cfg.reference_threshold_mw * result.threshold_ratio)} mW "
        f"(reference {_fmt(cfg.reference_threshold_mw)} mW)"
    )
    return 0


def _sweep_curves(cfg: ExperimentConfig, signal: HGMode):
    """(name, threshold_mw, safe_mw) per pump curve, exact for canonical modes."""
    ref = cfg.reference_threshold_mw
    curves = []
    for mode in ("hg00", "hg20", "optimal"):
        curve = _CANONICAL_CURVES[mode]
        num, den = curve["ratio"]
        p_th = ref * num / den
        safe = (
            math.inf
            if curve["safe"] is None
            else ref * curve["safe"][0] / curve["safe"][1]
        )
        curves.append((mode, p_th, safe))
    if cfg.pump_mode == "custom":
        pump = _build_pump("custom", cfg.custom_coefficients, signal)
        result = coupling_coefficient(pump, signal, signal)
        if abs(result.gamma) <= 1e-12:
            raise NoOscillationError("custom pump does not couple to the target mode")
        p_th = ref / result.gamma**2
        fundamental = HGMode(0, 0, signal.waist)
        g00 = coupling_coefficient(pump, fundamental, fundamental).gamma
        safe = math.inf if abs(g00) <= 1e-12 else ref / g00**2
        curves.append(("custom", p_th, safe))
    return curves


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    signal = HGMode(*TARGET_SIGNAL, 1.0)
    if args.pmax < args.pmin or args.step <= 0.0:
        raise UsageError("empty power range: need pmin <= pmax and step > 0")
    curves = _sweep_curves(cfg, signal)
    ref = cfg.reference_threshold_mw
    eff = cfg.efficiencies

    for name, p_th, safe in curves:
        note = f"target threshold {_fmt(p_th)} mW"
        if math.isinf(safe):
            note += "; no competing oscillation"
        else:
            note += f"; HG00 signal oscillates beyond {_fmt(safe)} mW"
            note += f" (max usable p/p_th = {_fmt(min(1.0, safe / p_th))})"
        print(f"# {name}: {note}", file=sys.stderr)

    header = ["power_mw", "pump_ratio"]
    for name, _, _ in curves:
        header += [f"V_{name}", f"flag_{name}"]

    rows = []
    n_steps = int(math.floor((args.pmax - args.pmin) / args.step + 1e-9))
    for i in range(n_steps + 1):
        power = args.pmin + i * args.step
        row = [_fmt(power), _fmt(power / ref)]
        for name, p_th, safe in curves:
            ratio = power / p_th
            if ratio < 1.0 and power <= safe:
                row += [_fmt(inseparability(ratio, cfg.omega_norm, eff)), ""]
            else:
                row += ["", "oscillates"]
        rows.append(row)
    _write_csv(args.csv, header, rows)
    return 0


def cmd_insep(args) -> int:
    v = inseparability_from_db(args.db_x_sum, args.db_y_diff)
    entangled = "entangled (V < 2)" if v < 2.0 else "not entangled (V >= 2)"
    print(f"V = {_fmt(v)}   [{entangled}]")
    corrected = None
    if args.eta_det is not None:
        corrected = infer_source_inseparability(v, args.eta_det)
        print(f"source V (eta_det = {_fmt(args.eta_det)}) = {_fmt(corrected)}")
    if args.reference is not None:
        base = corrected if corrected is not None else v
        gain = enhancement_percent(args.reference, base)
        print(f"enhancement vs reference {_fmt(args.reference)}: {_fmt(gain)}%")
    return 0


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    if not 0.0 <= args.sigma < 0.95:
        raise UsageError(
            f"sigma must be in [0, 0.95) (linearization margin), got {args.sigma}"
        )
    omega = cfg.omega_norm if args.omega is None else args.omega
    sim = SimConfig.from_segments(
        params=cfg.cavity,
        segments_per_trajectory=args.segments,
        pump_ratio=args.sigma**2,
        relative_phase=math.pi,
        seed=args.seed,
        n_trajectories=args.trajectories,
        segment_lifetimes=args.segment_lifetimes,
    )
    spectra = simulate_joint_spectra(sim, omega, backend=args.backend)

    esc = cfg.cavity.escape_efficiency
    source = EfficiencyChain.from_totals(1.0, esc)
    ana_sq = squeezed_variance(sim.pump_ratio, omega, source)
    sigma = sim.sigma
    ana_anti = 1.0 + esc * 4.0 * sigma / ((1.0 - sigma) ** 2 + omega**2)

    sq = spectra.squeezed
    anti = spectra.antisqueezed
    bound = max(SIM_TOLERANCE * abs(ana_sq), 3.0 * sq.std_error)
    status = "PASS" if abs(sq.v_estimate - ana_sq) <= bound else "FAIL"

    print(
        f"sigma = {_fmt(args.sigma)}  omega_norm = {_fmt(omega)}  "
        f"pump_ratio = {_fmt(sim.pump_ratio)}  regime = {sim.regime}"
    )
    print(
        f"trajectories = {sim.n_trajectories}  segments = {sq.n_effective}  "
        f"seed = {args.seed}"
    )
    print("combination   analytic     estimate     std_error    n_eff")
    print(
        f"squeezed      {ana_sq:<12.6g} {sq.v_estimate:<12.6g} "
        f"{sq.std_error:<12.3g} {sq.n_effective}"
    )
    print(
        f"antisqueezed  {ana_anti:<12.6g} {anti.v_estimate:<12.6g} "
        f"{anti.std_error:<12.3g} {anti.n_effective}"
    )
    print(f"squeezed vs analytic within max(5% rel, 3 SE): {status}")

    if args.csv:
        header = [
            "sigma", "omega_norm", "combination", "analytic",
            "estimate", "std_error", "n_effective", "status",
        ]
        rows = [
            [_fmt(args.sigma), _fmt(omega), "squeezed", _fmt(ana_sq),
             _fmt(sq.v_estimate), _fmt(sq.std_error), str(sq.n_effective), status],
            [_fmt(args.sigma), _fmt(omega), "antisqueezed", _fmt(ana_anti),
             _fmt(anti.v_estimate), _fmt(anti.std_error), str(anti.n_effective), ""],
        ]
        _write_csv(args.csv, header, rows)
    return 0 if status == "PASS" else 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tmopo",
        description="Transverse-mode OPO toolkit: couplings, thresholds, "
        "entanglement spectra and stochastic verification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gamma", help="coupling coefficients of a pump mode")
    p.add_argument("--pump", required=True,
                   help="hg00 | hg20 | optimal | custom:c0,c1,...")
    p.add_argument("--signal", default="10", help="signal mode digits, e.g. 10")
    p.add_argument("--csv", default=None, help="write the per-order table as CSV")
    p.set_defaults(func=cmd_gamma)

    p = sub.add_parser("threshold", help="absolute thresholds per pump mode")
    p.add_argument("--config", default=None)
    p.add_argument("--signal", default="10")
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("optimize", help="best pump superposition for a target mode")
    p.add_argument("--signal", default="10")
    p.add_argument("--orders", default="0-6", help="basis orders, e.g. 0-6 or 0,2,4")
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("sweep", help="inseparability vs pump power as CSV")
    p.add_argument("--config", default=None)
    p.add_argument("--pmin", type=float, required=True, help="start power in mW")
    p.add_argument("--pmax", type=float, required=True, help="end power in mW")
    p.add_argument("--step", type=float, required=True, help="power step in mW")
    p.add_argument("--csv", default=None, help="output file (default: stdout)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("insep", help="inseparability from measured dB noise powers")
    p.add_argument("db_x_sum", type=float, help="amplitude-sum squeezing in dB")
    p.add_argument("db_y_diff", type=float, help="phase-difference squeezing in dB")
    p.add_argument("--eta-det", type=float, default=None,
                   help="detection efficiency for source-level correction")
    p.add_argument("--reference", type=float, default=None,
                   help="reference V to compute the enhancement against")
    p.set_defaults(func=cmd_insep)

    p = sub.add_parser("simulate", help="Langevin run vs analytic spectrum")
    p.add_argument("--sigma", type=float, required=True,
                   help="pump amplitude relative to threshold, in [0, 0.95)")
    p.add_argument("--omega", type=float, default=None,
                   help="analysis frequency in cavity bandwidths (default: config)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config", default=None)
    p.add_argument("--csv", default=None)
    p.add_argument("--trajectories", type=int, default=8)
    p.add_argument("--segments", type=int, default=24,
                   help="spectral segments per trajectory")
    p.add_argument("--segment-lifetimes", type=float, default=300.0)
    p.add_argument("--backend", choices=("numba", "numpy"), default=None)
    p.set_defaults(func=cmd_simulate)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (
        NoOscillationError,
        AboveThresholdError,
        UnphysicalInputError,
        NoCouplingError,
        QuadratureError,
        ConvergenceError,
        NumericalInstabilityError,
        ValueError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
