"""Timing comparison of the numba and numpy kernel implementations.

Runs both batched-Horner backends and both cofactor-cross backends on
identical inputs sized like a real verification sweep and prints the
per-call times with the speedup.  Usage:

    python3 benchmarks/bench_kernels.py [--points N] [--repeats R]
"""

import argparse
import time

import numpy as np

from minkaehler import kernels


def best_of(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--points", type=int, default=20000, help="batch size")
    parser.add_argument("--repeats", type=int, default=5, help="timed repetitions")
    parser.add_argument("--order", type=int, default=32, help="series order")
    parser.add_argument("--rows", type=int, default=36, help="series stack height")
    parser.add_argument("--dim", type=int, default=4, help="chart dimension d")
    args = parser.parse_args()

    if not kernels.HAS_NUMBA:
        print(
            "numba backend unavailable (MINKAEHLER_PURE_NUMPY set or numba "
            "missing); nothing to compare"
        )
        return 1

    rng = np.random.default_rng(0)
    coeffs = rng.standard_normal((args.rows, args.order + 1)) + 1j * rng.standard_normal(
        (args.rows, args.order + 1)
    )
    dz = 0.4 * (rng.standard_normal(args.points) + 1j * rng.standard_normal(args.points))
    d1 = rng.standard_normal((args.points, args.dim, args.dim + 1))

    kernels.warmup()
    # agreement guard before timing anything
    np.testing.assert_allclose(
        kernels.horner_many_numba(coeffs, dz),
        kernels.horner_many_numpy(coeffs, dz),
        rtol=1e-12,
        atol=1e-12,
    )
    np.testing.assert_allclose(
        kernels.cross_columns_numba(d1),
        kernels.cross_columns_numpy(d1),
        rtol=1e-10,
        atol=1e-10,
    )

    cases = [
        (
            f"horner_many  ({args.rows} series, order {args.order}, "
            f"{args.points} points)",
            lambda: kernels.horner_many_numba(coeffs, dz),
            lambda: kernels.horner_many_numpy(coeffs, dz),
        ),
        (
            f"cross_columns (d={args.dim}, {args.points} points)",
            lambda: kernels.cross_columns_numba(d1),
            lambda: kernels.cross_columns_numpy(d1),
        ),
    ]
    print(f"best of {args.repeats} runs per backend\n")
    header = f"{'kernel':<55} {'numba':>10} {'numpy':>10} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for label, fast, slow in cases:
        t_numba = best_of(fast, args.repeats)
        t_numpy = best_of(slow, args.repeats)
        print(
            f"{label:<55} {t_numba * 1e3:>8.2f}ms {t_numpy * 1e3:>8.2f}ms "
            f"{t_numpy / t_numba:>7.1f}x"
        )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
