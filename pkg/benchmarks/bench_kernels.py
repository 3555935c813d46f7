"""Benchmark the numba kernels against the pure-numpy fallbacks.

Usage:
    python benchmarks/bench_kernels.py [--grid 2000] [--repeats 5]

The numba path is whatever `plurimean.kernels` selected at import time;
set PLURIMEAN_NO_NUMBA=1 to confirm the fallback timing matches the
"numpy" column here.
"""

import argparse
import time

import numpy as np

from plurimean import kernels


def _data(G, d=4, n=6, seed=0):
    rng = np.random.default_rng(seed)
    alpha = rng.standard_normal((G, d, d, n))
    alpha = 0.5 * (alpha + alpha.transpose(0, 2, 1, 3))
    dg = rng.standard_normal((G, d, d, d))
    A = rng.standard_normal((G, d, d))
    g = np.einsum("gik,gjk->gij", A, A) + 4.0 * np.eye(d)
    ginv = np.linalg.inv(g)
    R = kernels.gauss_curvature_numpy(alpha)
    return alpha, dg, ginv, R


def _time(fn, *args, repeats=5):
    fn(*args)  # warm-up (numba compilation)
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--grid", type=int, default=2000,
                    help="number of grid points (default 2000)")
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    alpha, dg, ginv, R = _data(args.grid)
    cases = [
        ("gauss_curvature", kernels.gauss_curvature,
         kernels.gauss_curvature_numpy, (alpha,)),
        ("christoffel", kernels.christoffel,
         kernels.christoffel_numpy, (dg, ginv)),
        ("gauss_residual", kernels.gauss_residual,
         kernels.gauss_residual_numpy, (R, alpha)),
    ]
    print(f"grid points: {args.grid}, numba active: {kernels.USING_NUMBA}")
    print(f"{'kernel':18s} {'selected [ms]':>14s} {'numpy [ms]':>12s} "
          f"{'speedup':>8s}")
    for name, fast, slow, data in cases:
        t_fast = _time(fast, *data, repeats=args.repeats)
        t_slow = _time(slow, *data, repeats=args.repeats)
        print(f"{name:18s} {1e3 * t_fast:14.3f} {1e3 * t_slow:12.3f} "
              f"{t_slow / t_fast:8.2f}x")


if __name__ == "__main__":
    main()
