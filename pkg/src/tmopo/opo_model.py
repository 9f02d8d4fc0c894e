"""Analytic below-threshold OPO model.

Covers oscillation thresholds, the correlation noise spectra of the joint
signal/idler quadratures under cavity loss and imperfect detection, the
two-mode inseparability criterion (V < 2 certifies entanglement), and the
conversions used when working with measured noise powers in dB.

Conventions: variances are normalized to shot noise, so vacuum gives 1 per
quadrature and V = 2 at zero pump. sigma = sqrt(p/p_th) is the pump
amplitude relative to threshold; Omega is the analysis frequency in units
of the cavity bandwidth gamma'/tau.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

AMPLIFICATION = "amplification"
DEAMPLIFICATION = "deamplification"
_REGIMES = (AMPLIFICATION, DEAMPLIFICATION)

SHOT_NOISE_SUM = 2.0  # two-quadrature inseparability of vacuum


class NoOscillationError(ValueError):
    """The pump does not couple to the requested mode; no threshold exists."""


class AboveThresholdError(ValueError):
    """Pump at or above threshold; the linearized spectra do not apply."""


class UnphysicalInputError(ValueError):
    """Measured values incompatible with the stated efficiencies."""


@dataclass(frozen=True)
class CavityParams:
    """Loss and timing parameters of the cavity.

    gamma_s / gamma_i are the output-coupler transmission losses of signal
    and idler (the symmetric model requires them equal), mu the additional
    intracavity loss, tau the round-trip time in seconds and chi the
    nonlinear coefficient in arbitrary units. The pump coupler loss is
    fixed at 1, which makes the pump field follow its drive adiabatically.
    """

    gamma_s: float
    mu: float = 0.0
    tau: float = 1.0
    chi: float = 1.0
    gamma_i: float | None = None
    gamma_p: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.gamma_s <= 1.0:
            raise ValueError(f"gamma_s must be in (0, 1], got {self.gamma_s}")
        if self.gamma_i is not None and not math.isclose(
            self.gamma_i, self.gamma_s, rel_tol=1e-12
        ):
            raise ValueError("asymmetric signal/idler losses are not supported")
        if self.mu < 0.0:
            raise ValueError(f"mu must be non-negative, got {self.mu}")
        if not self.tau > 0.0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        if not self.chi > 0.0:
            raise ValueError(f"chi must be positive, got {self.chi}")
        if self.gamma_p != 1.0:
            raise ValueError("only gamma_p = 1 is supported")

    @property
    def gamma_prime(self) -> float:
        """Total signal/idler loss gamma + mu."""
        return self.gamma_s + self.mu

    @property
    def escape_efficiency(self) -> float:
        """Fraction of the total loss that is useful output coupling."""
        return self.gamma_s / self.gamma_prime

    @property
    def bandwidth_rad(self) -> float:
        """Cavity bandwidth gamma'/tau in rad/s."""
        return self.gamma_prime / self.tau


@dataclass(frozen=True)
class EfficiencyChain:
    """Detection-path efficiencies and the cavity escape efficiency."""

    eta_prop: float = 1.0
    eta_hd: float = 1.0
    eta_phot: float = 1.0
    eta_esc: float = 1.0

    def __post_init__(self):
        for name in ("eta_prop", "eta_hd", "eta_phot", "eta_esc"):
            value = getattr(self, name)
            if not 0.0 < value <= 1.0:
                raise ValueError(f"{name} must be in (0, 1], got {value}")

    @classmethod
    def from_totals(cls, eta_det: float, eta_esc: float) -> "EfficiencyChain":
        """Build from the lumped detection efficiency instead of components."""
        return cls(eta_prop=eta_det, eta_hd=1.0, eta_phot=1.0, eta_esc=eta_esc)

    @property
    def eta_det(self) -> float:
        """Total detection efficiency (propagation x homodyne x photodiode)."""
        return self.eta_prop * self.eta_hd * self.eta_phot

    @property
    def eta_total(self) -> float:
        return self.eta_det * self.eta_esc


IDEAL_EFFICIENCIES = EfficiencyChain()


@dataclass(frozen=True)
class SpectrumPoint:
    """Squeezed-combination variances at one analysis frequency.

    v_sum_x and v_diff_y are the shot-noise-normalized variances of the
    squeezed joint quadratures. The names follow the deamplification
    regime, where X_s + X_i and Y_s - Y_i are squeezed; in amplification
    the same numbers belong to X_s - X_i and Y_s + Y_i (the two regimes
    share one spectrum and differ only in which combinations it applies
    to), so ``regime`` is carried as a label.
    """

    omega_norm: float
    v_sum_x: float
    v_diff_y: float
    regime: str = DEAMPLIFICATION


def threshold(params: CavityParams, gamma_coupling: float) -> float:
    """Threshold pump power p_th = gamma'^2 / (chi^2 gamma^2).

    Raises NoOscillationError for non-positive coupling: a mode the pump
    does not couple to cannot be driven to oscillation.
    """
    if not gamma_coupling > 0.0:
        raise NoOscillationError(
            f"coupling coefficient must be positive, got {gamma_coupling}"
        )
    return params.gamma_prime**2 / (params.chi**2 * gamma_coupling**2)


def pump_parameter_threshold(params: CavityParams, gamma_coupling: float) -> float:
    """Threshold pump amplitude parameter gamma' / (chi gamma)."""
    if not gamma_coupling > 0.0:
        raise NoOscillationError(
            f"coupling coefficient must be positive, got {gamma_coupling}"
        )
    return params.gamma_prime / (params.chi * gamma_coupling)


def squeezed_variance(pump_ratio: float, omega_norm: float, eff: EfficiencyChain) -> float:
    """Shot-noise-normalized variance of one squeezed joint quadrature.

    v = 1 - eta_det eta_esc * 4 sqrt(r) / ((1 + sqrt(r))^2 + Omega^2)

    with r = p/p_th in [0, 1). Vacuum input (r = 0) gives exactly 1.
    """
    if pump_ratio < 0.0:
        raise ValueError(f"pump_ratio must be non-negative, got {pump_ratio}")
    if pump_ratio >= 1.0:
        raise AboveThresholdError(
            f"pump_ratio must be below 1 (got {pump_ratio}); the linearized "
            "spectra are only valid below threshold"
        )
    if omega_norm < 0.0:
        raise ValueError(f"omega_norm must be non-negative, got {omega_norm}")
    sigma = math.sqrt(pump_ratio)
    lorentz = 4.0 * sigma / ((1.0 + sigma) ** 2 + omega_norm**2)
    return 1.0 - eff.eta_det * eff.eta_esc * lorentz


def correlation_spectrum(
    pump_ratio: float,
    omega_norm: float,
    eff: EfficiencyChain,
    regime: str = DEAMPLIFICATION,
) -> SpectrumPoint:
    """Correlation noise spectrum of the squeezed combinations.

    Both regimes produce the same squeezed-variance value; the regime only
    selects which joint quadratures (sum or difference) carry it.
    """
    if regime not in _REGIMES:
        raise ValueError(f"regime must be one of {_REGIMES}, got {regime!r}")
    v = squeezed_variance(pump_ratio, omega_norm, eff)
    return SpectrumPoint(omega_norm=omega_norm, v_sum_x=v, v_diff_y=v, regime=regime)


def inseparability(pump_ratio: float, omega_norm: float, eff: EfficiencyChain) -> float:
    """Two-mode inseparability V = var(X_s + X_i) + var(Y_s - Y_i).

    The symmetric system squeezes both combinations equally, so V = 2 v.
    V < 2 certifies entanglement; vacuum sits exactly at 2.
    """
    point = correlation_spectrum(pump_ratio, omega_norm, eff, DEAMPLIFICATION)
    return point.v_sum_x + point.v_diff_y


def inseparability_from_db(db_x_sum: float, db_y_diff: float) -> float:
    """V from measured squeezing magnitudes in dB below shot noise."""
    return 10.0 ** (-db_x_sum / 10.0) + 10.0 ** (-db_y_diff / 10.0)


def apply_detection_loss(v: float, eta: float) -> float:
    """Beam-splitter loss map on a two-quadrature variance sum.

    Each quadrature mixes with vacuum: v -> eta v + (1 - eta) * 2. Shot
    noise (v = 2) is a fixed point, and composing maps multiplies the
    efficiencies.
    """
    if not 0.0 < eta <= 1.0:
        raise ValueError(f"eta must be in (0, 1], got {eta}")
    return eta * v + (1.0 - eta) * SHOT_NOISE_SUM


def infer_source_inseparability(v_measured: float, eta_det: float) -> float:
    """Invert the detection-loss map to recover the source inseparability.

    v_src = (v_meas - 2 (1 - eta_det)) / eta_det. Raises
    UnphysicalInputError when the measured value is too low to be the
    image of any physical source under the stated efficiency.
    """
    if not 0.0 < eta_det <= 1.0:
        raise ValueError(f"eta_det must be in (0, 1], got {eta_det}")
    if not 0.0 <= v_measured <= SHOT_NOISE_SUM:
        raise ValueError(
            f"v_measured must be in [0, 2] for a squeezed pair, got {v_measured}"
        )
    v_src = (v_measured - SHOT_NOISE_SUM * (1.0 - eta_det)) / eta_det
    if v_src < 0.0:
        raise UnphysicalInputError(
            f"measured inseparability {v_measured} is below the vacuum floor "
            f"for detection efficiency {eta_det}"
        )
    return v_src


def enhancement_percent(v_ref: float, v_new: float) -> float:
    """Relative improvement of an inseparability, (v_ref/v_new - 1) * 100."""
    if not v_new > 0.0:
        raise ValueError(f"v_new must be positive, got {v_new}")
    return (v_ref / v_new - 1.0) * 100.0


def reduction_percent(ref: float, new: float) -> float:
    """Relative reduction (1 - new/ref) * 100, e.g. of a threshold power."""
    if not ref > 0.0:
        raise ValueError(f"ref must be positive, got {ref}")
    return (1.0 - new / ref) * 100.0
