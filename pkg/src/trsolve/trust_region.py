"""Trust-region maximization through eigenvalue computations.

Solves

    maximize    x' A x + 2 b' x
    subject to  x' M x <= 1,

with A symmetric (possibly indefinite), M positive definite (``None``
means the identity), in time near-linear in the stored entries.  The
solver never factorizes anything: it reduces the problem to a short
sequence of approximate largest-eigenvalue computations.

Reduction pipeline, per feasibility level ``c``:

1.  The objective part of the problem is normalized by the certified
    bound ``lambda_hat`` so its scale is at most one.  This keeps the
    quantities fed to the eigenvalue oracle well above roundoff and makes
    the internal conditioning of the lifted problem as small as the
    constraint matrix allows (exactly 1 when M is the identity).
2.  Level and constraint are embedded into two (n+1)-dimensional bordered
    operators (:func:`lifted_pair`), both of spectral norm at most one,
    so that a trust-region vector attaining level ``c`` corresponds to a
    unit-trace PSD matrix with positive inner products against both.
3.  :func:`trsolve.sdp.solve_sdp` runs a dual bisection over the two
    lifted constraints.  The tolerance handed to it is

        eps_sdp = eps_scaled / (4 * kappa_scaled**2),

    where one ``1 / kappa_scaled`` converts problem-level slack into
    lifted-trace units (the lift divides every quadratic value by
    ``2 * kappa_scaled``) and the remaining factors absorb the objective
    drift caused by shrinking the ellipsoid.  With this calibration an
    infeasibility certificate at level c proves v* < c + 2 * eps.
4.  A feasible rank-two solution is rotated so both components carry a
    fair share of the objective form, and any component clearing
    ``eps_sdp / (4 r)`` on the constraint form de-homogenizes into a
    vector x that satisfies x' A x + 2 b' x >= c and x' M x <= 1 exactly
    (up to roundoff; both are re-verified before returning).

Oracle-call budget per feasibility solve (with precomputed conditioning):
``ceil(log2(8 / eps_sdp)) + 1`` -- the bisection steps plus the p = 1
endpoint; the p = 0 endpoint of the lifted pair has the known closed-form
top eigenpair e_1 and is seeded analytically.  For identity-M problems
this equals ``ceil(log2(16 * kappa_hat / eps)) + 2``.

:func:`maximize` wraps the feasibility solver in a bisection over the
level, returning the best re-verified witness.  An infeasible level
contributes the bound v* < c + 2 * eps, the final bracket is at most
``eps`` wide, so the returned value is within ``3 * eps`` of the optimum
(the advertised guarantee keeps a margin at ``4 * eps``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import eigs, rotation, sdp
from .errors import InternalInconsistencyError, InvalidProblemError
from .sparse import Bordered, MatvecCounter, SymmetricCSR, matvec, quad_form


@dataclass(frozen=True)
class TrustRegionProblem:
    """Problem data (A, b, M); ``m=None`` is the identity-ellipsoid sentinel."""

    a: SymmetricCSR
    b: np.ndarray
    m: SymmetricCSR | None = None

    def __post_init__(self):
        b = np.asarray(self.b, dtype=np.float64)
        object.__setattr__(self, "b", b)
        if b.shape != (self.a.n,):
            raise InvalidProblemError("b length must match the matrix dimension")
        if not np.all(np.isfinite(b)):
            raise InvalidProblemError("b entries must be finite")
        if self.m is not None and self.m.n != self.a.n:
            raise InvalidProblemError("constraint matrix dimension mismatch")

    @property
    def n(self):
        return self.a.n

    @property
    def nnz_bound(self):
        """max(nnz(A), nnz(M), n); the instance-size unit of all runtime claims."""
        m_nnz = self.n if self.m is None else self.m.nnz
        return max(self.a.nnz, m_nnz, self.n)


@dataclass(frozen=True)
class ConditioningEstimates:
    """Certified conditioning bounds; lambda_hat over-, mu_hat under-estimates."""

    lambda_hat: float
    mu_hat: float
    kappa_hat: float
    norm_a_upper: float
    norm_b: float
    norm_m_upper: float


@dataclass(frozen=True)
class FoundVector:
    x: np.ndarray
    value: float
    level: float
    oracle_calls: int
    sdp_iterations: int

    @property
    def found(self):
        return True


@dataclass(frozen=True)
class InfeasibleAtLevel:
    level: float
    witness_weight: float
    witness_rayleigh: float
    oracle_calls: int
    sdp_iterations: int

    @property
    def found(self):
        return False


@dataclass(frozen=True)
class MaximizeResult:
    value: float
    x: np.ndarray
    oracle_calls: int
    matvecs: int
    outer_iterations: int
    conditioning: ConditioningEstimates | None = None
    feasibility_calls: tuple = field(default=())


def estimate_conditioning(prob, delta, rng, counter=None, calls=None):
    """Certified conditioning estimates in linear time.

    ``lambda_hat`` lies within a factor 2 above the true scale bound
    ``max(2(||A|| + ||b||), ||M||, 1)`` and ``mu_hat`` within a factor 2
    below ``min(lambda_min(M), 1)``, each with failure probability
    ``delta / 3``.  An identity sentinel skips the M-side estimates and
    pins them exactly.
    """
    nu_a = eigs.spectral_norm_upper(prob.a, delta / 3.0, rng, counter, calls)
    norm_b = float(np.linalg.norm(prob.b))
    if prob.m is None:
        nu_m = 1.0
        mu = 1.0
    else:
        nu_m = eigs.spectral_norm_upper(prob.m, delta / 3.0, rng, counter, calls)
        mu = min(eigs.min_eig_lower(prob.m, delta / 3.0, rng, counter, calls), 1.0)
    lam = max(2.0 * (nu_a + norm_b), nu_m, 1.0)
    return ConditioningEstimates(
        lambda_hat=lam,
        mu_hat=mu,
        kappa_hat=lam / mu,
        norm_a_upper=nu_a,
        norm_b=norm_b,
        norm_m_upper=nu_m,
    )


def lifted_pair(a, b, m, level, kappa, objective_scale=1.0):
    """Bordered operator pair embedding level and ellipsoid constraints.

    Returns views of

        (1 / 2 kappa) [[-c, b'], [b, A]]    and    (1 / 2 kappa) [[1, 0], [0, -M]],

    where (A, b, c) enter multiplied by ``objective_scale``.  Both views
    have spectral norm at most one whenever
    ``level * objective_scale + 2 * objective_scale * (||A|| + ||b||) <= 2 kappa``
    and ``1 + ||M|| <= 2 kappa`` -- the conditioning estimates guarantee
    this for every level up to ``kappa``.
    """
    s = 1.0 / (2.0 * kappa)
    block_m = SymmetricCSR.identity(a.n) if m is None else m
    lift_obj = Bordered(
        corner=-level * objective_scale * s,
        border=np.asarray(b, dtype=np.float64) * (objective_scale * s),
        block=a,
        block_scale=objective_scale * s,
    )
    lift_ball = Bordered(corner=s, border=None, block=block_m, block_scale=-s)
    return lift_obj, lift_ball


def _scaled_conditioning(cond):
    """Conditioning of the problem after dividing (A, b) by lambda_hat."""
    lam = cond.lambda_hat
    lam_scaled = max(2.0 * (cond.norm_a_upper + cond.norm_b) / lam, cond.norm_m_upper, 1.0)
    return lam_scaled, lam_scaled / cond.mu_hat


def feasibility_call_budget(kappa_hat, eps):
    """Documented oracle-call bound per feasibility solve, identity-M case."""
    return math.ceil(math.log2(16.0 * kappa_hat / eps)) + 2


def solve_feasibility(prob, level, eps, delta, rng, cond=None, counter=None):
    """Find x with value >= level inside the ellipsoid, or certify the gap.

    Returns :class:`FoundVector` whose vector satisfies both constraints
    (re-verified before returning), or :class:`InfeasibleAtLevel`, which
    with probability >= 1 - delta implies v* < level + 2 * eps.

    ``cond`` may carry precomputed conditioning estimates; otherwise half
    the failure budget is spent computing them here.  ``level`` must lie
    in [0, kappa_hat].
    """
    if counter is None:
        counter = MatvecCounter()
    estimation_calls = 0
    if cond is None:
        tally = MatvecCounter()
        cond = estimate_conditioning(prob, delta / 2.0, rng, counter, calls=tally)
        estimation_calls = tally.count
        delta = delta / 2.0
    lam = cond.lambda_hat
    if not 0.0 < eps < lam:
        raise InvalidProblemError(f"eps must lie in (0, {lam:.3e})")
    if not -1e-12 <= level <= cond.kappa_hat * (1.0 + 1e-12):
        raise InvalidProblemError(
            f"level {level} outside the certified range [0, {cond.kappa_hat:.3e}]"
        )
    level = min(max(level, 0.0), cond.kappa_hat)

    lam_scaled, kappa_scaled = _scaled_conditioning(cond)
    eps_scaled = eps / lam
    eps_sdp = eps_scaled / (4.0 * kappa_scaled * kappa_scaled)

    lift_obj, lift_ball = lifted_pair(
        prob.a, prob.b, prob.m, level, kappa_scaled, objective_scale=1.0 / lam
    )
    # Top eigenpair of the ball lift is e_1 with value 1/(2 kappa) exactly
    # (the -M block is negative definite), so the low endpoint needs no
    # oracle call.
    head = np.zeros(prob.n + 1)
    head[0] = 1.0
    s = 1.0 / (2.0 * kappa_scaled)
    seed = sdp.EndpointSeed(
        vector=head,
        rayleigh=s,
        quads=(-level / lam * s, s),
    )

    outcome = sdp.solve_sdp(
        lift_obj, lift_ball, eps_sdp, delta, rng, seed_low=seed, counter=counter
    )
    if isinstance(outcome, sdp.SdpInfeasible):
        return InfeasibleAtLevel(
            level=level,
            witness_weight=outcome.weight,
            witness_rayleigh=outcome.rayleigh,
            oracle_calls=outcome.oracle_calls + estimation_calls,
            sdp_iterations=outcome.iterations,
        )

    rotated = rotation.equalize_rayleighs(lift_obj, outcome.vectors, counter=counter)
    threshold = eps_sdp / (4.0 * len(rotated))
    x = rotation.extract_solution(rotated, lift_ball, threshold, counter=counter)

    value = quad_form(prob.a, x, counter) + 2.0 * float(np.dot(prob.b, x))
    ball = float(np.dot(x, x)) if prob.m is None else quad_form(prob.m, x, counter)
    if value < level - 1e-9 * lam or ball > 1.0 + 1e-9:
        raise InternalInconsistencyError(
            "extracted vector fails re-verification",
            value=value,
            level=level,
            ball=ball,
        )
    return FoundVector(
        x=x,
        value=value,
        level=level,
        oracle_calls=outcome.oracle_calls + estimation_calls,
        sdp_iterations=outcome.iterations,
    )


def maximize(prob, eps, delta, rng):
    """Approximate the constrained maximum to additive accuracy 4 * eps.

    Bisects the level over [0, kappa_hat] (the optimum is nonnegative and
    at most lambda / mu), keeping the best re-verified witness.  The
    failure budget is split half to conditioning estimation and half
    uniformly over the level probes.
    """
    if not 0.0 < eps:
        raise InvalidProblemError("eps must be positive")
    if not 0.0 < delta < 1.0:
        raise InvalidProblemError("delta must lie in (0, 1)")
    counter = MatvecCounter()
    n = prob.n

    if not np.any(prob.a.vals) and not np.any(prob.b):
        # identically-zero objective: the origin is optimal
        return MaximizeResult(
            value=0.0,
            x=np.zeros(n),
            oracle_calls=0,
            matvecs=0,
            outer_iterations=0,
        )

    est_tally = MatvecCounter()
    cond = estimate_conditioning(prob, delta / 2.0, rng, counter, calls=est_tally)
    high = cond.kappa_hat
    if 4.0 * eps >= high:
        # the optimum lies in [0, kappa_hat], so the origin already meets
        # the advertised accuracy
        return MaximizeResult(
            value=0.0,
            x=np.zeros(n),
            oracle_calls=est_tally.count,
            matvecs=counter.count,
            outer_iterations=0,
            conditioning=cond,
        )
    eps_inner = min(eps, cond.lambda_hat / 2.0)  # level probes need eps below the scale bound
    outer_budget = max(1, math.ceil(math.log2(high / eps)))
    per_call = (delta / 2.0) / outer_budget

    low = 0.0
    best_x = np.zeros(n)
    best_value = 0.0
    oracle_calls = est_tally.count
    outer = 0
    call_log = []
    while high - low > eps and outer < outer_budget + 4:
        level = 0.5 * (low + high)
        out = solve_feasibility(prob, level, eps_inner, per_call, rng, cond=cond, counter=counter)
        oracle_calls += out.oracle_calls
        outer += 1
        call_log.append((level, out.found, out.oracle_calls))
        if out.found:
            if out.value > best_value:
                best_value = out.value
                best_x = out.x
            low = min(max(low, out.value), high)
        else:
            high = level

    value = quad_form(prob.a, best_x, counter) + 2.0 * float(np.dot(prob.b, best_x))
    return MaximizeResult(
        value=value,
        x=best_x,
        oracle_calls=oracle_calls,
        matvecs=counter.count,
        outer_iterations=outer,
        conditioning=cond,
        feasibility_calls=tuple(call_log),
    )
