"""Pairwise rotations equalizing quadratic shares of a rank-one decomposition.

Given vectors x_1..x_r with X = sum_i x_i x_i' and a symmetric form A,
:func:`equalize_rayleighs` rotates pairs of vectors -- never changing the
Gram sum X -- until every component carries at least its fair share
``(A . X) / r`` of the total.  Each rotation mixes the currently largest
component with a deficient one:

    y_i = (t x_i + x_j) / sqrt(t^2 + 1),
    y_j = (x_i - t x_j) / sqrt(t^2 + 1),

where t is a root of the quadratic that pins y_i' A y_i exactly at the
fair share.  The root is real because the leading and trailing
coefficients have opposite signs; at most r - 1 rotations are needed
because every step settles one component at the share and the Gram sum
forces the last one.

:func:`extract_solution` then picks a component clearing a second-form
threshold and divides out its head coordinate.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import InternalInconsistencyError, NumericalDegeneracyError
from .sparse import matvec, quad_form

# Rayleigh comparisons use an absolute band scaled by the total share;
# the loop guard is exact in the idealized arithmetic and needs slack here.
SHARE_BAND = 1e-9

_DEGENERATE_COEFF = 1e-12


def _smaller_root(qa, qb, qc):
    """Smaller-magnitude root of qa t^2 + qb t + qc = 0, stable form."""
    disc = qb * qb - 4.0 * qa * qc
    if disc < -1e-12:
        raise InternalInconsistencyError(
            "rotation quadratic has complex roots", qa=qa, qb=qb, qc=qc, disc=disc
        )
    sq = math.sqrt(max(disc, 0.0))
    big = -(qb + math.copysign(sq, qb)) / (2.0 * qa)
    if big == 0.0:
        return 0.0
    small = qc / (qa * big)  # product of roots is qc / qa
    return small if abs(small) <= abs(big) else big


def equalize_rayleighs(form, vectors, step_hook=None, counter=None):
    """Rotate ``vectors`` so every component's Rayleigh value reaches the mean.

    Parameters
    ----------
    form : symmetric operator
    vectors : sequence of 1-D arrays
        Rank-one decomposition; not modified.
    step_hook : callable, optional
        Invoked after each rotation with the current list of vectors
        (copies), for invariant checks.
    counter : MatvecCounter, optional

    Returns
    -------
    list of 1-D arrays with the same Gram sum, each satisfying
    ``v' form v >= (form . X) / r - 1e-9 * max(1, |form . X|)``.
    """
    vecs = [np.array(v, dtype=np.float64) for v in vectors]
    r = len(vecs)
    if r == 0:
        raise ValueError("decomposition must contain at least one vector")
    products = [matvec(form, v, counter) for v in vecs]
    shares = [float(np.dot(v, p)) for v, p in zip(vecs, products)]
    total = math.fsum(shares)
    target = total / r
    band = SHARE_BAND * max(1.0, abs(total))

    for _ in range(r - 1):
        j = min(range(r), key=shares.__getitem__)
        if shares[j] >= target - band:
            break
        i = max(range(r), key=shares.__getitem__)
        qa = shares[i] - target
        if qa <= _DEGENERATE_COEFF * max(1.0, abs(target)):
            # sum of shares equals r * target, so a deficient component
            # guarantees a strictly overfull one; reaching here means the
            # bookkeeping broke down
            raise InternalInconsistencyError(
                "no overfull component to rotate against", shares=list(shares)
            )
        qc = shares[j] - target
        cross = float(np.dot(vecs[i], products[j]))
        t = _smaller_root(qa, 2.0 * cross, qc)
        scale = 1.0 / math.sqrt(t * t + 1.0)
        vi = (t * vecs[i] + vecs[j]) * scale
        vj = (vecs[i] - t * vecs[j]) * scale
        # the form's action updates linearly, so no new products are needed
        pi = (t * products[i] + products[j]) * scale
        pj = (products[i] - t * products[j]) * scale
        vecs[i], vecs[j] = vi, vj
        products[i], products[j] = pi, pj
        shares[i] = float(np.dot(vi, pi))
        shares[j] = float(np.dot(vj, pj))
        if step_hook is not None:
            step_hook([v.copy() for v in vecs])

    low = min(shares)
    if low < target - band - 1e-12 * max(1.0, abs(total)):
        raise InternalInconsistencyError(
            "rotation loop exhausted without equalizing",
            shares=list(shares),
            target=target,
        )
    return vecs


def extract_solution(vectors, ball_form, threshold, counter=None):
    """De-homogenize the first component clearing ``threshold`` on ``ball_form``.

    Scans in order, returns ``v[1:] / v[0]`` for the first vector with
    ``v' ball_form v >= threshold``.  No qualifying component signals an
    upstream bug; a qualifying component with a vanishing head coordinate
    is a numerical degeneracy (the threshold should rule it out).
    """
    values = []
    for v in vectors:
        val = quad_form(ball_form, v, counter)
        values.append(val)
        if val >= threshold:
            alpha = float(v[0])
            if abs(alpha) < 1e-12:
                raise NumericalDegeneracyError(
                    "selected component has a vanishing head coordinate",
                    alpha=alpha,
                    share=val,
                    threshold=threshold,
                )
            return v[1:] / alpha
    raise InternalInconsistencyError(
        "no component clears the extraction threshold",
        threshold=threshold,
        values=values,
    )
