"""Timing comparison of the projected-gradient master loops.

Runs the compiled loop (when built) against the pure numpy implementation
on random simplex-constrained quadratics over a sweep of basis sizes,
checking that both land on the same objective value to 1e-9.

Usage: python benchmarks/bench_fgpm.py [--sizes 5,10,20,40,80]
"""

import argparse
import time

import numpy as np

from sdqp.fgpm import HAVE_COMPILED_FGPM, FgpmParams, solve_master_fgpm


class SimplexMaster:
    """Minimal master-state stand-in: quadratic over the unit simplex."""

    def __init__(self, h_mat, h_vec):
        self.h_mat = np.ascontiguousarray(h_mat, dtype=float)
        self.h_vec = np.ascontiguousarray(h_vec, dtype=float)
        self.lam = np.full(self.h_vec.size, 1.0 / self.h_vec.size)

    @property
    def k(self):
        return self.h_vec.size

    def value(self, lam=None):
        lam = self.lam if lam is None else lam
        return float(0.5 * lam @ self.h_mat @ lam + self.h_vec @ lam)

    def gradient(self, lam=None):
        lam = self.lam if lam is None else lam
        return self.h_mat @ lam + self.h_vec


def random_master(rng, k):
    a = rng.standard_normal((k, k))
    return a @ a.T + 1e-8 * np.eye(k), rng.standard_normal(k)


def time_solve(h_mat, h_vec, use_compiled, repeats):
    best = np.inf
    value = None
    for _ in range(repeats):
        m = SimplexMaster(h_mat, h_vec)
        t0 = time.perf_counter()
        info = solve_master_fgpm(m, FgpmParams(), use_compiled=use_compiled)
        best = min(best, time.perf_counter() - t0)
        value = info.value
    return best, value


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="5,10,20,40,80")
    ap.add_argument("--masters", type=int, default=20,
                    help="random masters per size")
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    sizes = [int(k) for k in args.sizes.split(",")]
    rng = np.random.default_rng(args.seed)

    if not HAVE_COMPILED_FGPM:
        print("compiled loop not built; timing the pure path only")

    header = f"{'k':>6}{'pure':>14}"
    if HAVE_COMPILED_FGPM:
        header += f"{'compiled':>14}{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for k in sizes:
        masters = [random_master(rng, k) for _ in range(args.masters)]
        t_pure = t_comp = 0.0
        for h_mat, h_vec in masters:
            tp, vp = time_solve(h_mat, h_vec, False, args.repeats)
            t_pure += tp
            if HAVE_COMPILED_FGPM:
                tc, vc = time_solve(h_mat, h_vec, True, args.repeats)
                t_comp += tc
                gap = abs(vp - vc) / (1.0 + abs(vp))
                assert gap <= 1e-9, f"paths disagree by {gap:.2e} at k={k}"
        row = f"{k:>6}{t_pure / len(masters) * 1e6:>12.1f}us"
        if HAVE_COMPILED_FGPM:
            row += f"{t_comp / len(masters) * 1e6:>12.1f}us"
            row += f"{t_pure / t_comp:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
