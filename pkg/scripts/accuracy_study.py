#!/usr/bin/env python3
"""Accuracy study: the sparse solver against the dense reference oracle.

Draws random desk-scale instances (dense, sparse, concave, and
linear-term-orthogonal classes), solves each with the full pipeline and
with the eigendecomposition-based reference, and prints the worst and
mean optimality gaps per class.  Gaps should stay below 4 * eps.

Usage:
    python3 scripts/accuracy_study.py [--eps 1e-3] [--per-class 20] [--n 5 10 30]
"""

import argparse
import sys

import numpy as np

from trsolve.reference import solve_dense_exact
from trsolve.sparse import SymmetricCSR
from trsolve.trust_region import TrustRegionProblem, maximize


def dense_instance(n, rng):
    a = rng.standard_normal((n, n))
    a = 0.5 * (a + a.T)
    return a, rng.standard_normal(n)


def sparse_instance(n, rng):
    a, b = dense_instance(n, rng)
    keep = np.triu(rng.random((n, n)) < 0.05)
    a = np.where(keep | keep.T, a, 0.0)
    return a, b


def concave_instance(n, rng):
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    d = rng.uniform(0.0, 3.0, size=n)
    a = -(q * d) @ q.T
    return 0.5 * (a + a.T), rng.standard_normal(n)


def orthogonal_linear_instance(n, rng):
    a = np.zeros((n, n))
    a[0, 0] = 1.0
    b = np.zeros(n)
    b[1] = 10.0 ** rng.uniform(-6.0, -1.0)
    return a, b


CLASSES = {
    "dense": dense_instance,
    "sparse": sparse_instance,
    "concave": concave_instance,
    "orthogonal-linear": orthogonal_linear_instance,
}


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--eps", type=float, default=1e-3)
    parser.add_argument("--delta", type=float, default=0.1)
    parser.add_argument("--per-class", type=int, default=20)
    parser.add_argument("--n", type=int, nargs="+", default=[5, 10, 30])
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    print(f"{'class':>18} {'instances':>9} {'worst gap':>12} {'mean gap':>12} {'misses':>7}")
    for name, make in CLASSES.items():
        gaps = []
        misses = 0
        for idx in range(args.per_class):
            rng = np.random.default_rng(args.seed + idx)
            n = args.n[idx % len(args.n)]
            a, b = make(n, rng)
            prob = TrustRegionProblem(a=SymmetricCSR.from_dense(a), b=b)
            res = maximize(prob, args.eps, args.delta, np.random.default_rng(idx))
            v_star, _ = solve_dense_exact(a, b)
            gap = v_star - res.value
            gaps.append(gap)
            if gap > 4.0 * args.eps:
                misses += 1
        print(
            f"{name:>18} {len(gaps):>9} {max(gaps):>12.3e}"
            f" {sum(gaps) / len(gaps):>12.3e} {misses:>7}"
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
