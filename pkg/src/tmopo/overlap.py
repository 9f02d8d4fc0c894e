"""Three-field transverse overlap integrals and HG-basis pump decompositions.

The central quantity is the normalized coupling coefficient of a parametric
down-conversion process,

    gamma = integral v_p(r) u_s(r) u_i(r) dr  /  K00,

where v_p is the pump profile, u_s and u_i the signal/idler HG modes, and
K00 is the same integral for the fundamental process (HG00 pump of waist
w/sqrt(2), HG00 signal and idler of waist w). The normalization makes the
fundamental process have gamma = 1 exactly, so thresholds scale as
1/gamma^2 relative to it.

The pump of a frequency-doubled process shares the cavity geometry with
the signal, which fixes its waist at w/sqrt(2); that convention is baked
into the default basis waist and reproduces the standard coupling values
(gamma = 1/2 for an HG00 pump driving HG10, 1/sqrt(2) for HG20, zero for
odd pump orders).

Integrals are done by tensor-product Gauss-Hermite quadrature with the
node count doubled until the result is stable; integrands are polynomials
times Gaussians, for which this converges superexponentially.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .hg_modes import HGMode, amplitude

Profile = Callable[[np.ndarray, np.ndarray], np.ndarray]

_QUAD_ORDERS = (32, 64, 128, 256)
_QUAD_ATOL = 1e-12
_QUAD_RTOL = 1e-13
_NORM_TOL = 1e-12


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not stabilize; carries the error estimate."""

    def __init__(self, message: str, error_estimate: float):
        super().__init__(message)
        self.error_estimate = error_estimate


class InvalidModeConfigError(ValueError):
    """Signal/idler mode configuration the coupling model does not accept."""


@lru_cache(maxsize=None)
def _gh_modified(order: int):
    # nodes t_k and weights w_k e^{t_k^2}; the latter computed in log space
    # so large-|t| nodes do not underflow.
    t, w = np.polynomial.hermite.hermgauss(order)
    return t, np.exp(np.log(w) + t * t)


def _gh_tensor(integrand: Profile, scale: float, order: int) -> float:
    t, wm = _gh_modified(order)
    xg, yg = np.meshgrid(scale * t, scale * t, indexing="ij")
    return float(scale * scale * np.sum(np.outer(wm, wm) * integrand(xg, yg)))


def _adaptive_quad(integrand: Profile, scale: float) -> float:
    prev = _gh_tensor(integrand, scale, _QUAD_ORDERS[0])
    delta = math.inf
    for order in _QUAD_ORDERS[1:]:
        val = _gh_tensor(integrand, scale, order)
        delta = abs(val - prev)
        if delta <= _QUAD_ATOL + _QUAD_RTOL * abs(val):
            return val
        prev = val
    raise QuadratureError(
        f"quadrature did not stabilize by {_QUAD_ORDERS[-1]} points/axis "
        f"(last change {delta:.3e})",
        error_estimate=delta,
    )


def raw_overlap(
    pump_profile: Profile,
    signal: HGMode,
    idler: HGMode,
    profile_waist: float | None = None,
) -> float:
    """Unnormalized overlap  integral pump(x,y) u_s(x,y) u_i(x,y) dx dy.

    The pump profile is any square-integrable real callable decaying at
    infinity; it is evaluated on the quadrature grid. If the profile has a
    known Gaussian envelope, pass its waist as ``profile_waist`` so the
    quadrature variable can absorb the full decay (the integrand is then
    exactly polynomial and low orders suffice); otherwise the signal/idler
    Gaussians alone set the scale.

    Raises QuadratureError if successive node-count doublings do not agree.
    """
    inv_scale_sq = 1.0 / signal.waist**2 + 1.0 / idler.waist**2
    if profile_waist is not None:
        if not profile_waist > 0:
            raise ValueError(f"profile_waist must be positive, got {profile_waist}")
        inv_scale_sq += 1.0 / profile_waist**2
    scale = 1.0 / math.sqrt(inv_scale_sq)

    def integrand(x, y):
        return pump_profile(x, y) * amplitude(signal, x, y) * amplitude(idler, x, y)

    return _adaptive_quad(integrand, scale)


@dataclass(frozen=True)
class PumpSuperposition:
    """A unit-norm real pump superposition over the HG_n0 basis row.

    coefficients[n] multiplies the basis mode of x-order n (m = 0) at
    ``basis_waist``. The squared coefficients must sum to one; trailing
    zeros are fine.
    """

    coefficients: tuple[float, ...]
    basis_waist: float

    def __post_init__(self):
        if len(self.coefficients) == 0:
            raise ValueError("pump superposition needs at least one coefficient")
        if not self.basis_waist > 0:
            raise ValueError(f"basis_waist must be positive, got {self.basis_waist}")
        power = sum(c * c for c in self.coefficients)
        if abs(power - 1.0) > _NORM_TOL:
            raise ValueError(
                f"pump coefficients must be unit-norm (sum c^2 = {power!r})"
            )

    @classmethod
    def pure(cls, n: int, basis_waist: float) -> "PumpSuperposition":
        """A single HG_n0 basis mode."""
        if n < 0:
            raise ValueError(f"basis order must be non-negative, got {n}")
        return cls((0.0,) * n + (1.0,), basis_waist)

    def basis_modes(self) -> list[HGMode]:
        return [HGMode(n, 0, self.basis_waist) for n in range(len(self.coefficients))]

    def profile(self) -> Profile:
        """Synthesized pump field sum_n c_n v_n0(x, y)."""
        modes = self.basis_modes()
        coeffs = self.coefficients

        def field(x, y):
            total = coeffs[0] * amplitude(modes[0], x, y)
            for c, mode in zip(coeffs[1:], modes[1:]):
                if c != 0.0:
                    total = total + c * amplitude(mode, x, y)
            return total

        return field


@dataclass(frozen=True)
class CouplingResult:
    """Normalized coupling of a pump superposition to one signal/idler pair.

    gamma is the overlap normalized so the fundamental 00 -> 00 process is
    exactly 1; raw_integral is the unnormalized value (dimension 1/length);
    per_order[n] is the normalized coupling of basis order n alone.
    """

    gamma: float
    raw_integral: float
    per_order: tuple[float, ...]


def default_pump_waist(signal_waist: float) -> float:
    """Pump waist of a frequency-doubled pump sharing the signal cavity."""
    return signal_waist / math.sqrt(2.0)


def _k00(signal_waist: float) -> float:
    wp = default_pump_waist(signal_waist)
    fundamental = HGMode(0, 0, signal_waist)
    return raw_overlap(
        HGMode(0, 0, wp).profile(), fundamental, fundamental, profile_waist=wp
    )


def coupling_coefficient(
    pump: PumpSuperposition, signal: HGMode, idler: HGMode
) -> CouplingResult:
    """Normalized coupling coefficient of pump -> (signal, idler).

    Signal and idler must share a waist (type II polarization does not
    enter the spatial integral, so both carry the same transverse
    profile). The total gamma is integrated from the synthesized pump
    field; per_order comes from one quadrature per basis order, so the
    linearity gamma = sum_n c_n per_order[n] is a checkable property
    rather than an identity built into the return value.
    """
    if not math.isclose(signal.waist, idler.waist, rel_tol=1e-12, abs_tol=0.0):
        raise InvalidModeConfigError(
            f"signal and idler must share a waist, got {signal.waist} and {idler.waist}"
        )
    k00 = _k00(signal.waist)
    raw_total = raw_overlap(
        pump.profile(), signal, idler, profile_waist=pump.basis_waist
    )
    raws = [
        raw_overlap(mode.profile(), signal, idler, profile_waist=pump.basis_waist)
        for mode in pump.basis_modes()
    ]
    return CouplingResult(
        gamma=raw_total / k00,
        raw_integral=raw_total,
        per_order=tuple(r / k00 for r in raws),
    )


@dataclass(frozen=True)
class ProfileExpansion:
    """HG-basis projection of an arbitrary profile, without renormalization.

    captured_power = sum c_n^2 is the fraction of the profile's power held
    by the truncated expansion (1 for an exact representation). A warning
    string is attached when it falls below 0.99; normalizing to a valid
    pump superposition is an explicit caller decision via normalized().
    """

    coefficients: tuple[float, ...]
    basis_waist: float
    captured_power: float
    warning: str | None = None

    def normalized(self) -> PumpSuperposition:
        """Rescale to unit norm and return a usable pump superposition."""
        if self.captured_power <= 0.0:
            raise ValueError("cannot normalize an expansion with zero captured power")
        root = math.sqrt(self.captured_power)
        return PumpSuperposition(
            tuple(c / root for c in self.coefficients), self.basis_waist
        )

    def synthesize(self) -> Profile:
        """Reconstruct the truncated profile from its coefficients."""
        modes = [HGMode(n, 0, self.basis_waist) for n in range(len(self.coefficients))]

        def field(x, y):
            total = self.coefficients[0] * amplitude(modes[0], x, y)
            for c, mode in zip(self.coefficients[1:], modes[1:]):
                if c != 0.0:
                    total = total + c * amplitude(mode, x, y)
            return total

        return field


def expand_profile(
    profile: Profile, basis_waist: float, max_order: int
) -> ProfileExpansion:
    """Project a profile onto the HG_n0 basis row up to max_order.

    c_n = integral profile(x, y) v_n0(x, y) dx dy against the orthonormal
    basis of the given waist. The result is reported as-is together with
    the captured power fraction; nothing is renormalized silently.
    """
    if max_order < 0:
        raise ValueError(f"max_order must be non-negative, got {max_order}")
    if not basis_waist > 0:
        raise ValueError(f"basis_waist must be positive, got {basis_waist}")
    scale = basis_waist

    coeffs = []
    for n in range(max_order + 1):
        mode = HGMode(n, 0, basis_waist)

        def integrand(x, y, mode=mode):
            return profile(x, y) * amplitude(mode, x, y)

        coeffs.append(_adaptive_quad(integrand, scale))

    captured = sum(c * c for c in coeffs)
    warning = None
    if captured < 0.99:
        warning = (
            f"truncated expansion captures only {captured:.6f} of unit power; "
            f"increase max_order or check the basis waist"
        )
    return ProfileExpansion(tuple(coeffs), basis_waist, captured, warning)
