import numpy as np
import pytest

from helpers import csr_of, planted_pair
from trsolve.errors import InternalInconsistencyError
from trsolve.sdp import (
    DegradedWeightsWarning,
    EndpointSeed,
    SdpFeasible,
    SdpInfeasible,
    bisection_budget,
    combine_weights,
    solve_sdp,
)
from trsolve.sparse import MatvecCounter, quad_form


def reconstruct(outcome):
    x = sum(np.outer(v, v) for v in outcome.vectors)
    return x


class TestSolveSdp:
    def test_identical_easy_constraints(self):
        half_eye = csr_of(0.5 * np.eye(2))
        out = solve_sdp(half_eye, half_eye, 0.1, 0.1, np.random.default_rng(0))
        assert isinstance(out, SdpFeasible)
        x = reconstruct(out)
        # any unit witness gives constraint value 1/2, far above eps/2
        assert np.trace(x) <= 1.0 + 1e-10
        assert float(np.tensordot(half_eye.to_dense(), x)) >= 0.05 - 1e-10

    def test_negative_definite_constraint_infeasible(self):
        a1 = csr_of(-np.eye(3))
        a2 = csr_of(np.eye(3))
        out = solve_sdp(a1, a2, 0.1, 0.1, np.random.default_rng(1))
        assert isinstance(out, SdpInfeasible)
        assert out.oracle_calls <= 2
        assert out.rayleigh < 0.075

    def test_opposed_constraints_infeasible(self):
        # a1 . X = -(a2 . X) for every X, so no X clears both margins; the
        # dual certificate appears at the midpoint where the blend vanishes
        a1 = csr_of(np.diag([0.5, -0.5]))
        a2 = csr_of(np.diag([-0.5, 0.5]))
        eps = 0.05
        blend_sup = min(
            max(np.linalg.eigvalsh(p * a1.to_dense() + (1 - p) * a2.to_dense()).max(), 0.0)
            for p in np.linspace(0.0, 1.0, 2001)
        )
        assert blend_sup < eps  # grid check: the dual is feasible
        out = solve_sdp(a1, a2, eps, 0.1, np.random.default_rng(2))
        assert isinstance(out, SdpInfeasible)

    @pytest.mark.parametrize("seed", range(30))
    def test_planted_feasible(self, seed):
        rng = np.random.default_rng(seed)
        eps = 0.08
        a1, a2, _ = planted_pair(8, eps, rng)
        out = solve_sdp(a1, a2, eps, 0.1, rng)
        assert isinstance(out, SdpFeasible)
        x = reconstruct(out)
        w = np.linalg.eigvalsh(x)
        assert w[0] >= -1e-10
        assert np.trace(x) <= 1.0 + 1e-10
        for a in (a1, a2):
            assert float(np.tensordot(a.to_dense(), x)) >= eps / 2.0 - 1e-10

    def test_call_budget_and_gap(self):
        eps = 0.05
        rng = np.random.default_rng(7)
        a1, a2, _ = planted_pair(10, eps, rng)
        counter = MatvecCounter()
        out = solve_sdp(a1, a2, eps, 0.1, rng, counter=counter)
        budget = bisection_budget(eps)
        assert out.oracle_calls <= budget + 2
        if isinstance(out, SdpFeasible) and out.iterations == budget:
            assert out.gap <= eps / 8.0

    def test_endpoint_seed_saves_a_call(self):
        eps = 0.08
        rng_a = np.random.default_rng(21)
        a1, a2, _ = planted_pair(8, eps, rng_a)
        dense2 = a2.to_dense()
        w, u = np.linalg.eigh(dense2)
        top_vec = u[:, -1]
        seed = EndpointSeed(
            vector=top_vec,
            rayleigh=float(w[-1]),
            quads=(float(top_vec @ a1.to_dense() @ top_vec), float(w[-1])),
        )
        unseeded = solve_sdp(a1, a2, eps, 0.1, np.random.default_rng(5))
        seeded = solve_sdp(a1, a2, eps, 0.1, np.random.default_rng(5), seed_low=seed)
        assert isinstance(unseeded, SdpFeasible) and isinstance(seeded, SdpFeasible)
        assert seeded.oracle_calls == unseeded.oracle_calls - 1

    def test_witness_monotonicity(self):
        # recorded low witnesses must not gain value as the dual weight grows,
        # high witnesses must not lose it
        eps = 0.05
        rng = np.random.default_rng(3)
        a1, a2, _ = planted_pair(12, eps, rng)
        out = solve_sdp(a1, a2, eps, 0.1, rng)
        assert isinstance(out, SdpFeasible)
        low_slope = out.quads_low[0] - out.quads_low[1]
        high_slope = out.quads_high[0] - out.quads_high[1]
        assert low_slope <= 1e-12
        assert high_slope >= -1e-12

    def test_determinism(self):
        eps = 0.05
        a1, a2, _ = planted_pair(9, eps, np.random.default_rng(13))
        o1 = solve_sdp(a1, a2, eps, 0.1, np.random.default_rng(99))
        o2 = solve_sdp(a1, a2, eps, 0.1, np.random.default_rng(99))
        assert type(o1) is type(o2)
        assert o1.oracle_calls == o2.oracle_calls
        if isinstance(o1, SdpFeasible):
            for v1, v2 in zip(o1.vectors, o2.vectors):
                assert np.array_equal(v1, v2)

    def test_validation(self):
        eye = csr_of(np.eye(2))
        rng = np.random.default_rng(0)
        with pytest.raises(ValueError):
            solve_sdp(eye, eye, 1.5, 0.1, rng)
        with pytest.raises(ValueError):
            solve_sdp(eye, eye, 0.1, 0.0, rng)


class TestCombineWeights:
    def test_all_slack_midpoint(self):
        eps = 0.02
        x1 = np.array([1.0, 0.0])
        x2 = np.array([0.0, 1.0])
        q = combine_weights(x1, x2, None, None, eps, quads1=(eps, eps), quads2=(eps, eps))
        assert q == pytest.approx(0.5)

    def test_symmetric_crossing(self):
        eps = 0.02
        q = combine_weights(
            None, None, None, None, eps, quads1=(eps, 0.0), quads2=(0.0, eps)
        )
        assert q == pytest.approx(0.5)
        for w1, w2 in ((eps, 0.0), (0.0, eps)):
            assert q * w1 + (1 - q) * w2 >= eps / 2.0 - 1e-12

    @pytest.mark.parametrize("seed", range(40))
    def test_solver_witnesses_always_mix(self, seed):
        rng = np.random.default_rng(seed)
        eps = 0.06
        a1, a2, _ = planted_pair(7, eps, rng)
        out = solve_sdp(a1, a2, eps, 0.1, rng)
        if not isinstance(out, SdpFeasible):
            pytest.skip("rare oracle failure path")
        q = out.weight
        for i in range(2):
            mixed = q * out.quads_low[i] + (1 - q) * out.quads_high[i]
            assert mixed >= eps / 2.0 - 1e-12

    def test_degraded_fallback_warns(self):
        eps = 0.1
        # intersection empty by a hair: best mixes fall eps/16 short
        quads1 = (eps / 2.0 - eps / 16.0, eps / 2.0 - eps / 16.0)
        quads2 = quads1
        with pytest.warns(DegradedWeightsWarning):
            q = combine_weights(None, None, None, None, eps, quads1=quads1, quads2=quads2)
        assert 0.0 <= q <= 1.0

    def test_invalid_witnesses_raise(self):
        eps = 0.1
        with pytest.raises(InternalInconsistencyError):
            combine_weights(
                None, None, None, None, eps, quads1=(0.0, 0.0), quads2=(0.0, 0.0)
            )

    def test_computes_quads_when_missing(self):
        rng = np.random.default_rng(4)
        a1, a2, _ = planted_pair(5, 0.05, rng)
        x1 = np.zeros(5)
        x1[0] = 1.0
        x2 = np.zeros(5)
        x2[1] = 1.0
        counter = MatvecCounter()
        try:
            combine_weights(x1, x2, a1, a2, 0.05, counter=counter)
        except InternalInconsistencyError:
            pass  # arbitrary unit vectors need not mix; only the call matters
        assert counter.count == 4
