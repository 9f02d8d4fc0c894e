"""Euler-Maruyama trajectory kernels: numba hot path, pure-numpy fallback.

Both backends integrate the same linearized quadrature equations

    tau dx_s = (-gamma' x_s + cphi sigma gamma' x_i) dt
               + sqrt(2 gamma) dW_c + sqrt(2 mu) dW_l
    (and the y pair with the opposite coupling sign)

and accumulate a Hann-windowed DFT of the four joint output combinations
(x_s +/- x_i, y_s +/- y_i)/sqrt(2), with the output formed from the
input-output relation o = sqrt(2 gamma) x_cav - x_in before each step's
noise enters the state.

Backend selection: the environment variable TMOPO_KERNEL forces "numpy"
or "numba"; by default numba is used when importable. The two backends
consume identical noise streams and mirror each other's per-element
arithmetic, so their results agree to the last bit (the numpy path is
just batched over trajectories).
"""

from __future__ import annotations

import math
import os

import numpy as np

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None
    HAVE_NUMBA = False

_INV_SQRT2 = 1.0 / math.sqrt(2.0)


def available_backends() -> tuple[str, ...]:
    return ("numba", "numpy") if HAVE_NUMBA else ("numpy",)


def default_backend() -> str:
    """Kernel backend selected by TMOPO_KERNEL, or the fastest available."""
    env = os.environ.get("TMOPO_KERNEL", "").strip().lower()
    if env in ("numpy", "python"):
        return "numpy"
    if env == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("TMOPO_KERNEL=numba but numba is not importable")
        return "numba"
    if env:
        raise RuntimeError(f"unknown TMOPO_KERNEL value {env!r}")
    return "numba" if HAVE_NUMBA else "numpy"


def _transient_chunk_py(state, z, a, bx, by, kc, kl):
    xs, ys, xi, yi = state[0], state[1], state[2], state[3]
    ports = z.shape[1]
    for k in range(z.shape[0]):
        zxs = z[k, 0]
        zys = z[k, 1]
        zxi = z[k, 2]
        zyi = z[k, 3]
        nxs = kc * zxs
        nys = kc * zys
        nxi = kc * zxi
        nyi = kc * zyi
        if ports == 8:
            nxs = nxs + kl * z[k, 4]
            nys = nys + kl * z[k, 5]
            nxi = nxi + kl * z[k, 6]
            nyi = nyi + kl * z[k, 7]
        xs_n = xs - a * xs + bx * xi + nxs
        ys_n = ys - a * ys + by * yi + nys
        xi_n = xi - a * xi + bx * xs + nxi
        yi_n = yi - a * yi + by * ys + nyi
        xs, ys, xi, yi = xs_n, ys_n, xi_n, yi_n
    state[0] = xs
    state[1] = ys
    state[2] = xi
    state[3] = yi


def _segment_chunk_py(state, z, a, bx, by, kc, kl, oc, ow, wc, ws, out):
    xs, ys, xi, yi = state[0], state[1], state[2], state[3]
    re0 = 0.0 * xs
    im0 = 0.0 * xs
    re1 = 0.0 * xs
    im1 = 0.0 * xs
    re2 = 0.0 * xs
    im2 = 0.0 * xs
    re3 = 0.0 * xs
    im3 = 0.0 * xs
    ports = z.shape[1]
    for k in range(z.shape[0]):
        zxs = z[k, 0]
        zys = z[k, 1]
        zxi = z[k, 2]
        zyi = z[k, 3]
        # outputs use the state before this step's noise enters it
        oxs = oc * xs - ow * zxs
        oys = oc * ys - ow * zys
        oxi = oc * xi - ow * zxi
        oyi = oc * yi - ow * zyi
        v0 = (oxs + oxi) * _INV_SQRT2
        v1 = (oxs - oxi) * _INV_SQRT2
        v2 = (oys + oyi) * _INV_SQRT2
        v3 = (oys - oyi) * _INV_SQRT2
        c = wc[k]
        s = ws[k]
        re0 = re0 + c * v0
        im0 = im0 - s * v0
        re1 = re1 + c * v1
        im1 = im1 - s * v1
        re2 = re2 + c * v2
        im2 = im2 - s * v2
        re3 = re3 + c * v3
        im3 = im3 - s * v3
        nxs = kc * zxs
        nys = kc * zys
        nxi = kc * zxi
        nyi = kc * zyi
        if ports == 8:
            nxs = nxs + kl * z[k, 4]
            nys = nys + kl * z[k, 5]
            nxi = nxi + kl * z[k, 6]
            nyi = nyi + kl * z[k, 7]
        xs_n = xs - a * xs + bx * xi + nxs
        ys_n = ys - a * ys + by * yi + nys
        xi_n = xi - a * xi + bx * xs + nxi
        yi_n = yi - a * yi + by * ys + nyi
        xs, ys, xi, yi = xs_n, ys_n, xi_n, yi_n
    state[0] = xs
    state[1] = ys
    state[2] = xi
    state[3] = yi
    out[0, 0] = re0
    out[0, 1] = im0
    out[1, 0] = re1
    out[1, 1] = im1
    out[2, 0] = re2
    out[2, 1] = im2
    out[3, 0] = re3
    out[3, 1] = im3


if HAVE_NUMBA:
    _transient_chunk_nb = numba.njit(cache=True)(_transient_chunk_py)
    _segment_chunk_nb = numba.njit(cache=True)(_segment_chunk_py)
else:  # pragma: no cover
    _transient_chunk_nb = None
    _segment_chunk_nb = None


def run_trajectories(
    seed: int,
    n_trajectories: int,
    n_transient: int,
    seg_steps: int,
    n_segments: int,
    ports: int,
    a: float,
    bx: float,
    by: float,
    kc: float,
    kl: float,
    oc: float,
    ow: float,
    wc: np.ndarray,
    ws: np.ndarray,
    backend: str,
) -> np.ndarray:
    """Integrate all trajectories; return DFT accumulators.

    Output shape (n_trajectories, n_segments, 4, 2): windowed-DFT real and
    imaginary parts per joint combination (x_sum, x_diff, y_sum, y_diff).
    Trajectory t draws its noise from a generator seeded with (seed, t),
    one (steps, ports) block per chunk, identically on every backend.
    """
    if backend == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba backend requested but numba is unavailable")
        return _run_numba(
            seed, n_trajectories, n_transient, seg_steps, n_segments, ports,
            a, bx, by, kc, kl, oc, ow, wc, ws,
        )
    if backend == "numpy":
        return _run_numpy(
            seed, n_trajectories, n_transient, seg_steps, n_segments, ports,
            a, bx, by, kc, kl, oc, ow, wc, ws,
        )
    raise ValueError(f"unknown backend {backend!r}")


def _trajectory_rng(seed: int, traj: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed & (2**64 - 1), traj]))


def _run_numba(
    seed, n_trajectories, n_transient, seg_steps, n_segments, ports,
    a, bx, by, kc, kl, oc, ow, wc, ws,
):
    acc = np.zeros((n_trajectories, n_segments, 4, 2))
    out = np.zeros((4, 2))
    for t in range(n_trajectories):
        rng = _trajectory_rng(seed, t)
        state = np.zeros(4)
        if n_transient:
            z = rng.standard_normal((n_transient, ports))
            _transient_chunk_nb(state, z, a, bx, by, kc, kl)
        for s in range(n_segments):
            z = rng.standard_normal((seg_steps, ports))
            _segment_chunk_nb(state, z, a, bx, by, kc, kl, oc, ow, wc, ws, out)
            acc[t, s] = out
    return acc


def _run_numpy(
    seed, n_trajectories, n_transient, seg_steps, n_segments, ports,
    a, bx, by, kc, kl, oc, ow, wc, ws,
):
    rngs = [_trajectory_rng(seed, t) for t in range(n_trajectories)]
    acc = np.zeros((n_trajectories, n_segments, 4, 2))
    state = np.zeros((4, n_trajectories))
    out = np.zeros((4, 2, n_trajectories))

    def draw(steps):
        # (steps, ports, n_traj); each trajectory's stream matches the
        # per-trajectory blocks drawn by the numba path
        block = np.stack([rng.standard_normal((steps, ports)) for rng in rngs])
        return np.ascontiguousarray(np.moveaxis(block, 0, -1))

    if n_transient:
        _transient_chunk_py(state, draw(n_transient), a, bx, by, kc, kl)
    for s in range(n_segments):
        _segment_chunk_py(
            state, draw(seg_steps), a, bx, by, kc, kl, oc, ow, wc, ws, out
        )
        acc[:, s] = np.moveaxis(out, -1, 0)
    return acc
