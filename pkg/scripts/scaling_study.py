#!/usr/bin/env python3
"""Matvec-count scaling study: double the dimension, watch the work.

Builds random sparse instances with a fixed number of stored entries per
row and a normalized spectrum (so the conditioning stays in one class),
runs the full maximizer at fixed accuracy, and reports total
matrix-vector products per size.  Near-linear behavior shows up as a
growth factor close to 2 per doubling.

Usage:
    python3 scripts/scaling_study.py [--sizes 100 200 400 800] [--eps 1e-2] [--trials 2]
"""

import argparse
import sys
import time

import numpy as np

from trsolve.sparse import SymmetricCSR
from trsolve.trust_region import TrustRegionProblem, maximize


def scaling_instance(n, rng, row_entries=4, b_norm=0.25):
    entries = row_entries * n
    rows = rng.integers(0, n, size=entries)
    cols = rng.integers(0, n, size=entries)
    vals = rng.standard_normal(entries)
    a = SymmetricCSR.from_entries(n, rows, cols, vals)
    dense_norm = float(np.abs(np.linalg.eigvalsh(a.to_dense())).max())
    a = SymmetricCSR(a.n, a.indptr, a.cols, a.vals / dense_norm)
    b = rng.standard_normal(n)
    b *= b_norm / np.linalg.norm(b)
    return TrustRegionProblem(a=a, b=b)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=[100, 200, 400, 800])
    parser.add_argument("--eps", type=float, default=1e-2)
    parser.add_argument("--delta", type=float, default=0.1)
    parser.add_argument("--trials", type=int, default=2)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    print(f"{'n':>6} {'nnz':>7} {'matvecs':>10} {'calls':>6} {'sec':>7} {'ratio':>6}")
    previous = None
    for n in args.sizes:
        counts, calls, nnz = [], [], 0
        started = time.perf_counter()
        for trial in range(args.trials):
            rng = np.random.default_rng(args.seed + 1000 * trial + n)
            prob = scaling_instance(n, rng)
            nnz = prob.nnz_bound
            res = maximize(prob, args.eps, args.delta, np.random.default_rng(trial))
            counts.append(res.matvecs)
            calls.append(res.oracle_calls)
        elapsed = time.perf_counter() - started
        mean = sum(counts) / len(counts)
        ratio = "" if previous is None else f"{mean / previous:.2f}"
        previous = mean
        print(
            f"{n:>6} {nnz:>7} {int(mean):>10} {int(sum(calls) / len(calls)):>6}"
            f" {elapsed:>7.2f} {ratio:>6}"
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
