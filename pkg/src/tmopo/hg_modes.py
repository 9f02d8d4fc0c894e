"""Normalized Hermite-Gauss transverse modes, evaluated in the waist plane.

All profiles here are real valued: the Gouy and wavefront-curvature phases
vanish at the shared waist, which is where every overlap integral in this
package is taken. Modes carry unit L2 norm over the transverse plane,

    integral |u_nm(x, y)|^2 dx dy = 1,

and modes of equal waist are orthonormal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def hermite_polynomial(n: int, x):
    """Physicists' Hermite polynomial H_n(x).

    Evaluated with the three-term recurrence
    H_{n+1} = 2 x H_n - 2 n H_{n-1}, with H_0 = 1 and H_1 = 2x.
    Accepts scalars or ndarrays.
    """
    if n < 0:
        raise ValueError(f"Hermite order must be non-negative, got {n}")
    x = np.asarray(x, dtype=float)
    h = np.ones_like(x)
    if n == 0:
        return h if h.ndim else float(h)
    hp = h
    h = 2.0 * x
    for k in range(1, n):
        hp, h = h, 2.0 * x * h - 2.0 * k * hp
    return h if h.ndim else float(h)


@dataclass(frozen=True)
class HGMode:
    """An HG_nm transverse mode at its waist plane.

    n and m are the x and y Hermite orders; waist is the 1/e^2 field
    radius w (arbitrary length unit, shared by both axes).
    """

    n: int
    m: int = 0
    waist: float = 1.0

    def __post_init__(self):
        if self.n < 0 or self.m < 0:
            raise ValueError(
                f"mode indices must be non-negative, got ({self.n}, {self.m})"
            )
        if not self.waist > 0:
            raise ValueError(f"waist must be positive, got {self.waist}")

    @property
    def order(self) -> int:
        """Total transverse order n + m."""
        return self.n + self.m

    def profile(self):
        """The mode as a vectorized callable u(x, y)."""
        return lambda x, y: amplitude(self, x, y)


def _norm_1d(n: int, waist: float) -> float:
    # unit L2 norm along one axis: (2/pi)^(1/4) / sqrt(w 2^n n!)
    return (2.0 / math.pi) ** 0.25 / math.sqrt(waist * 2.0**n * math.factorial(n))


def amplitude(mode: HGMode, x, y):
    """Field amplitude u_nm(x, y) of a normalized HG mode.

    u_nm(x, y) = N_nm H_n(sqrt(2) x / w) H_m(sqrt(2) y / w)
                 exp(-(x^2 + y^2) / w^2)

    with N_nm fixed by the unit-norm condition. Broadcasts over array
    inputs; the peak of HG_00 is sqrt(2/pi)/w.
    """
    w = mode.waist
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    arg = math.sqrt(2.0) / w
    norm = _norm_1d(mode.n, w) * _norm_1d(mode.m, w)
    out = (
        norm
        * hermite_polynomial(mode.n, arg * x)
        * hermite_polynomial(mode.m, arg * y)
        * np.exp(-(x * x + y * y) / (w * w))
    )
    return out if np.ndim(out) else float(out)
