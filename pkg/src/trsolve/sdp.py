"""Two-constraint spectrahedron feasibility via dual bisection.

Solves programs of the shape

    find X positive semidefinite, trace(X) <= 1,
    with  a1 . X >= eps  and  a2 . X >= eps,

for symmetric operators of spectral norm at most one, given only an
approximate largest-eigenvalue oracle.  The dual variable is a single
weight p in [0, 1]; each bisection step asks the oracle for a top Ritz
pair of ``p * a1 + (1 - p) * a2``.  A Rayleigh value below ``3 eps / 4``
at any probed weight certifies that the program is infeasible.  Otherwise
the recorded witnesses at the two ends of the shrunken dual interval mix
into a rank-two solution: a weight ``q`` with

    q * x1' a_i x1 + (1 - q) * x2' a_i x2  >=  eps / 2   (i = 1, 2)

always exists once the interval is shorter than ``eps / 8``, and is found
by intersecting the two half-intervals the constraints induce on q.

Oracle budget: at most ``ceil(log2(8 / eps)) + 2`` calls -- the bisection
steps plus the two interval endpoints, which are evaluated up front so
both witnesses are always defined.  A caller that knows a top eigenpair
of ``a2`` in closed form can pass it as ``seed_low`` and save the p = 0
call.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import eigs
from .errors import InternalInconsistencyError
from .sparse import Blend, quad_form


class DegradedWeightsWarning(RuntimeWarning):
    """Witness mixing fell back to the minimax weight within tolerance."""


@dataclass(frozen=True)
class EndpointSeed:
    """Caller-certified top eigenpair of ``a2`` (the p = 0 blend).

    ``quads`` are the witness's Rayleigh quotients against (a1, a2).
    """

    vector: np.ndarray
    rayleigh: float
    quads: tuple


@dataclass(frozen=True)
class SdpFeasible:
    """Rank-two solution ``X = sum_i vectors[i] vectors[i]'``."""

    vectors: tuple
    weight: float
    witness_low: np.ndarray
    witness_high: np.ndarray
    quads_low: tuple
    quads_high: tuple
    oracle_calls: int
    iterations: int
    gap: float


@dataclass(frozen=True)
class SdpInfeasible:
    weight: float
    rayleigh: float
    oracle_calls: int
    iterations: int


def bisection_budget(eps):
    return math.ceil(math.log2(8.0 / eps))


def combine_weights(x1, x2, a1, a2, eps, quads1=None, quads2=None, counter=None):
    """Mixing weight q making both rank-two constraint values at least eps/2.

    Each constraint is linear in q, so it carves a half-interval out of
    [0, 1]; any point of the intersection works and the midpoint is
    returned.  When roundoff leaves the intersection empty, the minimax
    weight is returned instead provided its worst violation is within
    eps/8 (with a warning); a larger violation means the witnesses were
    invalid and raises.
    """
    if quads1 is None:
        quads1 = (quad_form(a1, x1, counter), quad_form(a2, x1, counter))
    if quads2 is None:
        quads2 = (quad_form(a1, x2, counter), quad_form(a2, x2, counter))
    need = eps / 2.0
    lo, hi = 0.0, 1.0
    scale = max(1.0, max(abs(v) for v in (*quads1, *quads2)))
    for w1, w2 in zip(quads1, quads2):
        coef = w1 - w2
        rhs = need - w2
        if abs(coef) <= 1e-15 * scale:
            if rhs > 1e-15 * scale:
                lo, hi = 1.0, 0.0  # constraint unsatisfiable for any q
                break
        elif coef > 0.0:
            lo = max(lo, rhs / coef)
        else:
            hi = min(hi, rhs / coef)
    if lo <= hi + 1e-12:
        return float(min(1.0, max(0.0, 0.5 * (lo + hi))))

    def worst(q):
        return max(
            need - (q * w1 + (1.0 - q) * w2) for w1, w2 in zip(quads1, quads2)
        )

    candidates = [0.0, 1.0]
    c1 = quads1[0] - quads2[0]
    c2 = quads1[1] - quads2[1]
    if c1 != c2:  # crossing of the two constraint lines
        q_cross = (quads2[1] - quads2[0]) / (c1 - c2)
        if 0.0 <= q_cross <= 1.0:
            candidates.append(q_cross)
    best = min(candidates, key=worst)
    violation = worst(best)
    if violation <= eps / 8.0:
        warnings.warn(
            f"weight mixing degraded: worst violation {violation:.3e}",
            DegradedWeightsWarning,
            stacklevel=2,
        )
        return float(best)
    raise InternalInconsistencyError(
        "no mixing weight satisfies the recorded witnesses",
        quads1=quads1,
        quads2=quads2,
        eps=eps,
        violation=violation,
    )


def solve_sdp(
    a1,
    a2,
    eps,
    delta,
    rng,
    oracle=eigs.approx_max_eigvec,
    seed_low=None,
    counter=None,
):
    """Run the dual bisection; returns :class:`SdpFeasible` or :class:`SdpInfeasible`.

    Preconditions: ``||a1||_2 <= 1``, ``||a2||_2 <= 1`` (caller-certified)
    and ``0 < eps < 1``.  The failure probability ``delta`` is split
    uniformly over the oracle-call budget.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    if a1.n != a2.n:
        raise ValueError("constraint operators must share a dimension")

    budget = bisection_budget(eps)
    per_call = delta / (budget + 2)
    accuracy = eps / 4.0
    bar = 0.75 * eps
    calls = 0

    def probe(p):
        nonlocal calls
        calls += 1
        if p == 0.0:
            blended = a2
        elif p == 1.0:
            blended = a1
        else:
            blended = Blend(p, a1, 1.0 - p, a2)
        est = oracle(blended, 1.0, accuracy, per_call, rng, counter=counter)
        quads = (quad_form(a1, est.vector, counter), quad_form(a2, est.vector, counter))
        return est, quads

    def feasible(x1, q1, x2, q2, iterations, gap):
        q = combine_weights(x1, x2, a1, a2, eps, quads1=q1, quads2=q2)
        parts = (math.sqrt(q) * x1, math.sqrt(1.0 - q) * x2)
        return SdpFeasible(
            vectors=parts,
            weight=q,
            witness_low=x1,
            witness_high=x2,
            quads_low=q1,
            quads_high=q2,
            oracle_calls=calls,
            iterations=iterations,
            gap=gap,
        )

    # Endpoint p = 0.  A witness recorded here must not gain value as p grows
    # (slope <= 0); a strictly increasing one already certifies feasibility on
    # the whole interval by itself.
    if seed_low is not None:
        low_vec, low_quads = seed_low.vector, tuple(seed_low.quads)
        low_rayleigh = seed_low.rayleigh
    else:
        est, low_quads = probe(0.0)
        low_vec, low_rayleigh = est.vector, est.rayleigh
    if low_rayleigh < bar:
        return SdpInfeasible(0.0, low_rayleigh, calls, 0)
    if low_quads[0] - low_quads[1] > 0.0:
        return feasible(low_vec, low_quads, low_vec, low_quads, 0, 0.0)

    # Endpoint p = 1, the mirror case.
    est, high_quads = probe(1.0)
    high_vec, high_rayleigh = est.vector, est.rayleigh
    if high_rayleigh < bar:
        return SdpInfeasible(1.0, high_rayleigh, calls, 0)
    if high_quads[0] - high_quads[1] < 0.0:
        return feasible(high_vec, high_quads, high_vec, high_quads, 0, 0.0)

    p_low, p_high = 0.0, 1.0
    for t in range(budget):
        p = 0.5 * (p_low + p_high)
        est, quads = probe(p)
        if est.rayleigh < bar:
            return SdpInfeasible(p, est.rayleigh, calls, t + 1)
        if quads[0] < quads[1]:
            p_low, low_vec, low_quads = p, est.vector, quads
        else:  # ties fall through to the high-end update
            p_high, high_vec, high_quads = p, est.vector, quads

    return feasible(low_vec, low_quads, high_vec, high_quads, budget, p_high - p_low)
