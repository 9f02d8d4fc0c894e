"""Stochastic verification of the analytic squeezing spectra.

This module integrates the linearized intracavity Langevin equations for
the signal/idler quadrature fluctuations with vacuum noise entering
through the output coupler and (optionally) the extra-loss port, forms
the output fields through the input-output relation, and estimates the
noise spectra of the joint quadratures by Hann-windowed segment-averaged
periodograms. It shares no formulas with opo_model beyond the physical
parameters, so agreement between the two is a real cross-check.

The pump is treated as a classical mean field (it follows its drive
adiabatically for unit pump coupler loss), entering only through the
normalized amplitude sigma = sqrt(p/p_th). Noise is calibrated so a
zero-pump run estimates exactly shot noise (1 per joint quadrature).

Everything is deterministic given SimConfig.seed: trajectory t draws from
a generator seeded with (seed, t) in a fixed chunk order, and the two
kernel backends consume identical streams.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .opo_model import AMPLIFICATION, DEAMPLIFICATION, CavityParams

_PHASE_TOL = 1e-9
MIN_STEPS_PER_LIFETIME = 50
MIN_SEGMENT_LIFETIMES = 20.0
MAX_PUMP_RATIO = 0.95
_FIXED_POINT_TOL = 1e-12
_FIXED_POINT_MAX_ITER = 10_000

_COMBO_NAMES = ("x_sum", "x_diff", "y_sum", "y_diff")


class ConvergenceError(RuntimeError):
    """Fixed-point iteration for the stationary fields did not converge."""


class NumericalInstabilityError(RuntimeError):
    """The integration produced non-finite values."""


@dataclass(frozen=True)
class SimConfig:
    """Configuration of one Langevin run.

    relative_phase is the pump-seed phase phi = theta_p - (theta_s +
    theta_i); 0 selects parametric amplification, pi deamplification.
    pump_ratio is p/p_th and must stay at or below 0.95 to keep the
    linearization honest. dt defaults to one hundredth of the cavity
    lifetime tau/gamma' and may not be coarser than one fiftieth.
    duration is the simulated time per trajectory; after discarding
    transient_lifetimes it must leave room for at least one spectral
    segment of segment_lifetimes cavity lifetimes.
    """

    params: CavityParams
    gamma_coupling: float = 1.0
    pump_ratio: float = 0.0
    relative_phase: float = math.pi
    dt: float = field(default=0.0)
    duration: float = field(default=0.0)
    seed: int = 0
    n_trajectories: int = 16
    segment_lifetimes: float = 300.0
    transient_lifetimes: float = 10.0

    def __post_init__(self):
        if not self.gamma_coupling > 0.0:
            raise ValueError(f"gamma_coupling must be positive, got {self.gamma_coupling}")
        if not 0.0 <= self.pump_ratio <= MAX_PUMP_RATIO:
            raise ValueError(
                f"pump_ratio must be in [0, {MAX_PUMP_RATIO}] (linearization "
                f"validity margin), got {self.pump_ratio}"
            )
        if not (
            abs(self.relative_phase) <= _PHASE_TOL
            or abs(self.relative_phase - math.pi) <= _PHASE_TOL
        ):
            raise ValueError(
                f"relative_phase must be 0 or pi, got {self.relative_phase}"
            )
        if self.dt == 0.0:
            object.__setattr__(self, "dt", self.lifetime / 100.0)
        if not self.dt > 0.0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.dt > self.lifetime / MIN_STEPS_PER_LIFETIME:
            raise ValueError(
                f"dt = {self.dt:g} is too coarse: need at least "
                f"{MIN_STEPS_PER_LIFETIME} steps per cavity lifetime "
                f"{self.lifetime:g}"
            )
        if self.duration == 0.0:
            object.__setattr__(
                self,
                "duration",
                (self.transient_lifetimes + 20.0 * self.segment_lifetimes)
                * self.lifetime,
            )
        if not self.duration > 0.0:
            raise ValueError(f"duration must be positive, got {self.duration}")
        if self.n_trajectories < 2:
            raise ValueError(
                f"need at least 2 trajectories for a standard error, got "
                f"{self.n_trajectories}"
            )
        if self.segment_lifetimes < MIN_SEGMENT_LIFETIMES:
            raise ValueError(
                f"segment_lifetimes must be >= {MIN_SEGMENT_LIFETIMES}, got "
                f"{self.segment_lifetimes}"
            )
        if self.transient_lifetimes < 0.0:
            raise ValueError("transient_lifetimes must be non-negative")
        if self.segments_per_trajectory < 1:
            raise ValueError(
                f"duration {self.duration:g} leaves no room for a full "
                f"{self.segment_lifetimes:g}-lifetime segment after the transient"
            )

    @property
    def lifetime(self) -> float:
        """Cavity field lifetime tau/gamma' in seconds."""
        return self.params.tau / self.params.gamma_prime

    @property
    def sigma(self) -> float:
        """Pump amplitude relative to threshold, sqrt(p/p_th)."""
        return math.sqrt(self.pump_ratio)

    @property
    def regime(self) -> str:
        return AMPLIFICATION if abs(self.relative_phase) <= _PHASE_TOL else DEAMPLIFICATION

    @property
    def segment_steps(self) -> int:
        return int(round(self.segment_lifetimes * self.lifetime / self.dt))

    @property
    def transient_steps(self) -> int:
        return int(round(self.transient_lifetimes * self.lifetime / self.dt))

    @property
    def segments_per_trajectory(self) -> int:
        usable = self.duration - self.transient_lifetimes * self.lifetime
        return int(usable // (self.segment_steps * self.dt))

    @classmethod
    def from_segments(
        cls,
        params: CavityParams,
        segments_per_trajectory: int,
        **kwargs,
    ) -> "SimConfig":
        """Size duration to hold exactly the requested number of segments."""
        kwargs.pop("duration", None)
        probe = cls(params=params, duration=1e30, **kwargs)
        duration = (
            (probe.transient_steps + segments_per_trajectory * probe.segment_steps)
            * probe.dt
            * (1.0 + 1e-12)
        )
        return cls(params=params, duration=duration, **kwargs)


@dataclass(frozen=True)
class SpectrumEstimate:
    """A spectral variance estimate with its statistical uncertainty.

    n_effective counts the independent windowed segments averaged; the
    standard error comes from the scatter of per-trajectory means.
    """

    omega_norm: float
    v_estimate: float
    std_error: float
    n_effective: int


@dataclass(frozen=True)
class JointSpectra:
    """Spectral estimates of all four joint quadrature combinations."""

    x_sum: SpectrumEstimate
    x_diff: SpectrumEstimate
    y_sum: SpectrumEstimate
    y_diff: SpectrumEstimate
    regime: str

    @property
    def squeezed(self) -> SpectrumEstimate:
        """The squeezed x combination (x_sum in deamplification)."""
        return self.x_sum if self.regime == DEAMPLIFICATION else self.x_diff

    @property
    def antisqueezed(self) -> SpectrumEstimate:
        """The antisqueezed x combination."""
        return self.x_diff if self.regime == DEAMPLIFICATION else self.x_sum

    @property
    def squeezed_y(self) -> SpectrumEstimate:
        return self.y_diff if self.regime == DEAMPLIFICATION else self.y_sum

    @property
    def antisqueezed_y(self) -> SpectrumEstimate:
        return self.y_sum if self.regime == DEAMPLIFICATION else self.y_diff


def _estimator_arrays(config: SimConfig, omega_norm: float):
    n = config.segment_steps
    t_seg = np.arange(n) * config.dt
    omega = omega_norm * config.params.bandwidth_rad
    window = 0.5 - 0.5 * np.cos(2.0 * math.pi * np.arange(n) / n)
    wc = window * np.cos(omega * t_seg)
    ws = window * np.sin(omega * t_seg)
    w2 = float(np.sum(window * window))
    return wc, ws, w2


def simulate_joint_spectra(
    config: SimConfig, omega_norm: float, backend: str | None = None
) -> JointSpectra:
    """Estimate the four joint-quadrature spectra at one analysis frequency.

    omega_norm is in units of the cavity bandwidth gamma'/tau. Returns
    shot-noise-normalized variances (vacuum = 1) with standard errors.
    """
    if omega_norm < 0.0:
        raise ValueError(f"omega_norm must be non-negative, got {omega_norm}")
    if backend is None:
        backend = _kernels.default_backend()

    p = config.params
    dt = config.dt
    cphi = 1.0 if config.regime == AMPLIFICATION else -1.0
    a = p.gamma_prime * dt / p.tau
    b = config.sigma * p.gamma_prime * dt / p.tau
    kc = math.sqrt(2.0 * p.gamma_s * dt) / p.tau
    kl = math.sqrt(2.0 * p.mu * dt) / p.tau
    oc = math.sqrt(2.0 * p.gamma_s)
    ow = 1.0 / math.sqrt(dt)
    ports = 4 if p.mu == 0.0 else 8
    wc, ws, w2 = _estimator_arrays(config, omega_norm)

    acc = _kernels.run_trajectories(
        seed=config.seed,
        n_trajectories=config.n_trajectories,
        n_transient=config.transient_steps,
        seg_steps=config.segment_steps,
        n_segments=config.segments_per_trajectory,
        ports=ports,
        a=a,
        bx=cphi * b,
        by=-cphi * b,
        kc=kc,
        kl=kl,
        oc=oc,
        ow=ow,
        wc=wc,
        ws=ws,
        backend=backend,
    )

    # periodogram: |windowed DFT|^2 * dt / sum(win^2); white noise of
    # variance 1/dt (discretized vacuum) then averages to exactly 1
    scale = dt / w2
    psd = (acc[..., 0] * acc[..., 0] + acc[..., 1] * acc[..., 1]) * scale
    if not np.all(np.isfinite(psd)):
        raise NumericalInstabilityError(
            "non-finite spectral estimate; reduce dt or pump_ratio"
        )

    n_eff = config.n_trajectories * config.segments_per_trajectory
    traj_means = psd.mean(axis=1)
    means = traj_means.mean(axis=0)
    errs = traj_means.std(axis=0, ddof=1) / math.sqrt(config.n_trajectories)

    estimates = {
        name: SpectrumEstimate(
            omega_norm=omega_norm,
            v_estimate=float(means[i]),
            std_error=float(errs[i]),
            n_effective=n_eff,
        )
        for i, name in enumerate(_COMBO_NAMES)
    }
    return JointSpectra(regime=config.regime, **estimates)


def simulate_spectrum(
    config: SimConfig, omega_norm: float, backend: str | None = None
) -> SpectrumEstimate:
    """Estimate the squeezed-combination variance at one frequency."""
    return simulate_joint_spectra(config, omega_norm, backend).squeezed


@dataclass(frozen=True)
class SteadyState:
    """Stationary intracavity mean fields in the theta_s = theta_i = 0 frame.

    The pump amplitude carries the sign of its drive (negative for
    deamplification, where the pump phase is pi).
    """

    pump: float
    signal: float
    idler: float


def steady_state(config: SimConfig, seed_amplitude: float = 0.0) -> SteadyState:
    """Solve the stationary classical mean-field equations.

    With no injected seed the below-threshold solution is exact: zero
    signal/idler and pump epsilon_p / gamma_p. With a seed the coupled
    equations (including pump depletion) are solved by fixed-point
    iteration to 1e-12. For a small seed the deamplified intracavity power
    is 1/(1+sigma)^2 of its zero-pump value, the classical signature the
    spectra build on.
    """
    p = config.params
    cphi = 1.0 if config.regime == AMPLIFICATION else -1.0
    chi_g = p.chi * config.gamma_coupling
    eps_th = p.gamma_prime / chi_g
    eps_p = config.sigma * eps_th
    if seed_amplitude == 0.0:
        return SteadyState(pump=cphi * eps_p / p.gamma_p, signal=0.0, idler=0.0)

    drive = math.sqrt(2.0 * p.gamma_s) * seed_amplitude
    pump = cphi * eps_p / p.gamma_p
    sig = idl = 0.0
    for _ in range(_FIXED_POINT_MAX_ITER):
        pump_n = (cphi * eps_p - chi_g * sig * idl) / p.gamma_p
        sig_n = (chi_g * pump_n * idl + drive) / p.gamma_prime
        idl_n = (chi_g * pump_n * sig + drive) / p.gamma_prime
        delta = max(abs(pump_n - pump), abs(sig_n - sig), abs(idl_n - idl))
        pump, sig, idl = pump_n, sig_n, idl_n
        if delta <= _FIXED_POINT_TOL * max(1.0, abs(pump), abs(sig), abs(idl)):
            return SteadyState(pump=pump, signal=sig, idler=idl)
    raise ConvergenceError(
        f"stationary fields did not converge within {_FIXED_POINT_MAX_ITER} iterations"
    )
