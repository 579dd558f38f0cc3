"""Dense exact trust-region oracle for desk-scale cross-checks.

Intentionally algorithm-independent from the main solver: this path uses
a full eigendecomposition and a one-dimensional secular equation, so
agreement between the two is evidence rather than tautology.  Dimensions
are capped at 64 and nothing here is performance-tuned.

Method: substitute y = M^(1/2) x, reducing the ellipsoid to the unit
ball; diagonalize the transformed quadratic; then the boundary maximizer
solves ``(sigma I - D) y = beta`` for the multiplier ``sigma`` above the
top eigenvalue, pinned by ``||y(sigma)|| = 1``.  When the linear term has
no weight on the top eigenspace the secular equation may have no root
there (the classically awkward configuration); the maximizer then sits at
``sigma = lambda_max`` with the residual norm made up by a top-eigenspace
component.  Interior critical points are compared by value when the
quadratic is concave.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidProblemError, NotPositiveDefiniteError, OracleFailureError

MAX_DIMENSION = 64
_SECULAR_BUDGET = 200


def _secular_norm(sigma, lam, beta):
    y = beta / (sigma - lam)
    return float(np.dot(y, y))


def solve_dense_exact(a, b, m=None, tol=1e-10):
    """Global maximum of x'Ax + 2b'x over x'Mx <= 1, to accuracy ``tol``.

    Parameters
    ----------
    a : (n, n) array_like, symmetric
    b : (n,) array_like
    m : (n, n) array_like, symmetric positive definite, optional
        ``None`` means the identity.
    tol : float
        Accuracy of the returned value.

    Returns
    -------
    (value, x) : float and ndarray
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    n = len(b)
    if a.shape != (n, n):
        raise InvalidProblemError("matrix/vector dimension mismatch")
    if n > MAX_DIMENSION:
        raise InvalidProblemError(f"reference oracle is capped at n <= {MAX_DIMENSION}")
    a = 0.5 * (a + a.T)

    if m is None:
        m_inv_half = None
        a_bar, b_bar = a, b
    else:
        m = 0.5 * (np.asarray(m, dtype=np.float64) + np.asarray(m, dtype=np.float64).T)
        try:
            np.linalg.cholesky(m)
        except np.linalg.LinAlgError as exc:
            raise NotPositiveDefiniteError("constraint matrix is not positive definite") from exc
        w, u = np.linalg.eigh(m)
        m_inv_half = (u / np.sqrt(w)) @ u.T
        a_bar = m_inv_half @ a @ m_inv_half
        a_bar = 0.5 * (a_bar + a_bar.T)
        b_bar = m_inv_half @ b

    lam, q = np.linalg.eigh(a_bar)
    beta = q.T @ b_bar
    lam_top = float(lam[-1])
    scale = max(1.0, float(np.abs(lam).max()), float(np.linalg.norm(beta)))

    def objective(y):
        return float(np.dot(y, lam * y) + 2.0 * np.dot(beta, y))

    candidates = [np.zeros(n)]  # the origin is always feasible with value 0

    # interior stationary point, relevant only for a strictly concave quadratic
    if lam_top < -tol * scale:
        y0 = -beta / lam
        if np.linalg.norm(y0) <= 1.0:
            candidates.append(y0)

    bnorm = float(np.linalg.norm(beta))
    if bnorm == 0.0:
        y = np.zeros(n)
        y[-1] = 1.0  # eigenvalues sorted ascending: last axis is a top eigenvector
        candidates.append(y)
    else:
        top_cluster = lam >= lam_top - 1e-12 * scale
        cluster_mass = float(np.linalg.norm(beta[top_cluster]))
        if cluster_mass <= 1e-14 * scale and _secular_norm(lam_top + 1e-12 * scale, lam[~top_cluster], beta[~top_cluster]) < 1.0:
            # no root above lam_top: fill the norm gap inside the top eigenspace
            y = np.zeros(n)
            mask = ~top_cluster
            y[mask] = beta[mask] / (lam_top - lam[mask])
            residual = 1.0 - float(np.dot(y, y))
            if residual < 0.0:
                raise OracleFailureError("hard-case branch produced an infeasible point")
            idx = int(np.argmax(top_cluster))
            y[idx] = np.sqrt(residual)
            candidates.append(y)
        else:
            # safeguarded bisection on ||y(sigma)||^2 = 1 over (lam_top, lam_top + ||beta||]
            hi = lam_top + bnorm
            lo = lam_top + max(1e-18 * scale, cluster_mass * 1e-2)
            while _secular_norm(lo, lam, beta) < 1.0:
                lo = lam_top + (lo - lam_top) * 0.5
                if lo - lam_top < 1e-300:
                    raise OracleFailureError("secular bracket collapsed")
            it = 0
            while hi - lo > 1e-15 * max(1.0, abs(hi)):
                it += 1
                if it > _SECULAR_BUDGET:
                    raise OracleFailureError("secular bisection did not converge")
                mid = 0.5 * (lo + hi)
                if _secular_norm(mid, lam, beta) >= 1.0:
                    lo = mid
                else:
                    hi = mid
            sigma = 0.5 * (lo + hi)
            y = beta / (sigma - lam)
            ynorm = np.linalg.norm(y)
            if ynorm > 0:
                y = y / ynorm  # land exactly on the boundary
            candidates.append(y)

    best = max(candidates, key=objective)
    value = objective(best)
    x = q @ best
    if m_inv_half is not None:
        x = m_inv_half @ x
    return value, x
