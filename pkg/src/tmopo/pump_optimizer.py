"""Optimal pump superpositions and competing-mode oscillation analysis.

The coupling of a unit-norm pump c to a fixed signal/idler pair is linear,
gamma = sum_n c_n gamma_n, so the best pump on the unit sphere is the
Cauchy-Schwarz maximizer c_n = gamma_n / sqrt(sum gamma_k^2) with
gamma_max = sqrt(sum gamma_k^2). No iteration is needed.

Driving a higher-order signal mode raises the question of which cavity
mode oscillates first as pump power rises: a pump component that also
couples to a lower-order mode can reach that mode's threshold before the
target's. competing_mode_analysis computes every threshold under a given
pump and reports the usable power window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .hg_modes import HGMode
from .opo_model import CavityParams, threshold
from .overlap import PumpSuperposition, coupling_coefficient, default_pump_waist

_COUPLING_EPS = 1e-12


class NoCouplingError(ValueError):
    """No basis order couples to the target mode."""


@dataclass(frozen=True)
class OptimizationResult:
    """Best unit-norm pump for a target signal/idler pair.

    threshold_ratio is the oscillation threshold relative to the
    fundamental 00 -> 00 process, i.e. 1 / gamma_max^2.
    """

    pump: PumpSuperposition
    gamma_max: float
    threshold_ratio: float
    per_order: tuple[float, ...]


def optimize_pump(
    signal: HGMode,
    idler: HGMode,
    basis_orders: list[int] | tuple[int, ...] | range,
    basis_waist: float | None = None,
) -> OptimizationResult:
    """Maximize the coupling over unit-norm pumps on the given basis orders.

    Computes gamma_n for each candidate order by quadrature and returns
    the closed-form maximizer of the linear functional on the unit sphere.
    Orders outside basis_orders get coefficient zero. Raises
    NoCouplingError when nothing couples (e.g. odd-only basis for an even
    target product).
    """
    orders = sorted(set(int(n) for n in basis_orders))
    if not orders:
        raise ValueError("basis_orders must be non-empty")
    if orders[0] < 0:
        raise ValueError(f"basis orders must be non-negative, got {orders[0]}")
    if basis_waist is None:
        basis_waist = default_pump_waist(signal.waist)

    gammas = np.zeros(orders[-1] + 1)
    for n in orders:
        pure = PumpSuperposition.pure(n, basis_waist)
        gammas[n] = coupling_coefficient(pure, signal, idler).per_order[n]

    total = float(np.sqrt(np.sum(gammas * gammas)))
    if total <= _COUPLING_EPS:
        raise NoCouplingError(
            f"no pump order in {orders} couples to signal HG{signal.n}{signal.m} "
            f"with idler HG{idler.n}{idler.m}"
        )
    coeffs = tuple(float(g / total) for g in gammas)
    return OptimizationResult(
        pump=PumpSuperposition(coeffs, basis_waist),
        gamma_max=total,
        threshold_ratio=1.0 / total**2,
        per_order=tuple(float(g) for g in gammas),
    )


@dataclass(frozen=True)
class CompetitionReport:
    """Oscillation thresholds of the target and its competitors under one pump.

    Thresholds are absolute pump powers in the units set by CavityParams.
    max_safe_pump is the lowest competitor threshold (inf when no
    competitor couples); achievable_pump_ratio is the largest usable
    p/p_th for the target, capped at 1. coupled_power_fraction maps each
    mode to the fraction of pump power carried by the basis orders that
    couple to it.
    """

    per_mode_threshold: dict[tuple[int, int], float]
    coupled_power_fraction: dict[tuple[int, int], float]
    first_oscillator: tuple[int, int]
    max_safe_pump: float
    achievable_pump_ratio: float
    target_threshold: float


def competing_mode_analysis(
    pump: PumpSuperposition,
    target: HGMode,
    competitors: list[HGMode] | None,
    params: CavityParams,
) -> CompetitionReport:
    """Which signal mode oscillates first as pump power rises.

    Each mode (signal = idler) sees the pump through its own coupling
    gamma_m = sum_n c_n gamma_n^(m); its threshold is the fundamental
    threshold divided by gamma_m^2, identical to giving the coupled pump
    components (power fraction sum_coupled c_n^2) their own threshold.
    Competitors default to all HG modes of total order lower than the
    target's.
    """
    if competitors is None:
        competitors = [
            HGMode(n, m, target.waist)
            for order in range(target.order)
            for n in range(order + 1)
            for m in [order - n]
        ]
    for comp in competitors:
        if (comp.n, comp.m) == (target.n, target.m):
            raise ValueError(f"competitor HG{comp.n}{comp.m} equals the target mode")

    def mode_threshold(mode: HGMode) -> tuple[float, float]:
        result = coupling_coefficient(pump, mode, mode)
        fraction = sum(
            c * c
            for c, g in zip(pump.coefficients, result.per_order)
            if abs(g) > _COUPLING_EPS
        )
        if abs(result.gamma) <= _COUPLING_EPS:
            return math.inf, fraction
        return threshold(params, abs(result.gamma)), fraction

    target_key = (target.n, target.m)
    per_mode: dict[tuple[int, int], float] = {}
    fractions: dict[tuple[int, int], float] = {}
    per_mode[target_key], fractions[target_key] = mode_threshold(target)

    max_safe = math.inf
    for comp in competitors:
        key = (comp.n, comp.m)
        per_mode[key], fractions[key] = mode_threshold(comp)
        max_safe = min(max_safe, per_mode[key])

    # ties go to the target: at equal thresholds the desired mode is not
    # preempted below its own threshold
    first = target_key
    best = per_mode[target_key]
    for key, p_th in per_mode.items():
        if key != target_key and p_th < best:
            first, best = key, p_th

    target_th = per_mode[target_key]
    if math.isinf(target_th):
        achievable = 0.0
    else:
        achievable = min(1.0, max_safe / target_th)

    return CompetitionReport(
        per_mode_threshold=per_mode,
        coupled_power_fraction=fractions,
        first_oscillator=first,
        max_safe_pump=max_safe,
        achievable_pump_ratio=achievable,
        target_threshold=target_th,
    )
