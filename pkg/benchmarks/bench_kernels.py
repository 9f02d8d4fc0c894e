"""Benchmark the Langevin trajectory kernels: numba vs pure numpy.

The two backends integrate identical noise streams, so besides timing
this doubles as an end-to-end equivalence check. Run:

    python benchmarks/bench_kernels.py [--segments N] [--trajectories N]
"""

import argparse
import time

from tmopo._kernels import available_backends
from tmopo.langevin import SimConfig, simulate_joint_spectra
from tmopo.opo_model import CavityParams


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trajectories", type=int, default=8)
    parser.add_argument("--segments", type=int, default=20)
    parser.add_argument("--segment-lifetimes", type=float, default=300.0)
    parser.add_argument("--sigma", type=float, default=0.7)
    parser.add_argument("--omega", type=float, default=0.18)
    args = parser.parse_args()

    params = CavityParams(gamma_s=0.03, mu=0.0, tau=1.0 / 2.4e9, chi=1.0)
    config = SimConfig.from_segments(
        params,
        args.segments,
        pump_ratio=args.sigma**2,
        seed=1,
        n_trajectories=args.trajectories,
        segment_lifetimes=args.segment_lifetimes,
    )
    steps = config.n_trajectories * (
        config.transient_steps
        + config.segments_per_trajectory * config.segment_steps
    )
    print(
        f"{config.n_trajectories} trajectories x "
        f"{config.segments_per_trajectory} segments x "
        f"{config.segment_steps} steps  ({steps / 1e6:.1f} M steps total)"
    )

    results = {}
    timings = {}
    for backend in available_backends():
        if backend == "numba":
            # compile outside the timed window
            warm = SimConfig.from_segments(
                params, 1, seed=0, n_trajectories=2,
                segment_lifetimes=20.0, transient_lifetimes=0.0,
            )
            simulate_joint_spectra(warm, 0.0, backend="numba")
        t0 = time.perf_counter()
        results[backend] = simulate_joint_spectra(config, args.omega, backend=backend)
        timings[backend] = time.perf_counter() - t0
        rate = steps / timings[backend] / 1e6
        print(
            f"{backend:<6s} {timings[backend]:8.3f} s   {rate:7.1f} M steps/s   "
            f"squeezed = {results[backend].squeezed.v_estimate:.6f}"
        )

    if len(results) == 2:
        a, b = results["numba"].squeezed, results["numpy"].squeezed
        print(f"speedup: {timings['numpy'] / timings['numba']:.1f}x")
        print(f"backends bit-identical: {a.v_estimate == b.v_estimate}")


if __name__ == "__main__":
    main()
