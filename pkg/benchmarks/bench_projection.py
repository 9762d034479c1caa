"""Timing comparison of the simplex-projection kernels.

Runs the compiled variable-fixing kernel (when built) against the pure
numpy fallback and the sort-based variant over a sweep of dimensions,
checking that all three agree to 1e-12 in the l-inf norm.

Usage: python benchmarks/bench_projection.py [--dims 10,100,1000,100000]
"""

import argparse
import time

import numpy as np

from sdqp.projection import (HAVE_COMPILED_KERNEL, project_simplex_fast,
                             project_simplex_pure, project_simplex_sort)


def time_fn(fn, points, repeats=5):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        for y in points:
            fn(y)
        best = min(best, time.perf_counter() - t0)
    return best / len(points)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--dims", default="10,100,1000,10000,100000")
    ap.add_argument("--points", type=int, default=200,
                    help="random inputs per dimension")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    dims = [int(d) for d in args.dims.split(",")]
    rng = np.random.default_rng(args.seed)

    kernels = [("sort", project_simplex_sort), ("pure", project_simplex_pure)]
    if HAVE_COMPILED_KERNEL:
        kernels.append(("compiled", project_simplex_fast))
    else:
        print("compiled kernel not built; comparing sort vs pure only")

    header = f"{'n':>8}" + "".join(f"{name:>14}" for name, _ in kernels)
    print(header)
    print("-" * len(header))
    for n in dims:
        points = [rng.normal(0.0, 1.0, n) * rng.uniform(0.5, 20.0)
                  for _ in range(args.points)]
        ref = [project_simplex_sort(y) for y in points]
        for name, fn in kernels[1:]:
            err = max(np.max(np.abs(fn(y) - r)) for y, r in zip(points, ref))
            assert err <= 1e-12, f"{name} disagrees with sort by {err:.2e} at n={n}"
        row = f"{n:>8}"
        for _, fn in kernels:
            row += f"{time_fn(fn, points) * 1e6:>12.2f}us"
        print(row)


if __name__ == "__main__":
    main()
