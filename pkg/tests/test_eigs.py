import numpy as np
import pytest

from helpers import csr_of, random_sparse_csr, random_spd_dense, random_symmetric_dense
from trsolve.eigs import (
    LANCZOS_ITER_COEFF,
    approx_max_eigvec,
    lanczos_iterations,
    min_eig_lower,
    spectral_norm_upper,
)
from trsolve.errors import NotPositiveDefiniteError
from trsolve.sparse import MatvecCounter, ScaledShifted, operator_dense


class TestApproxMaxEigvec:
    def test_diagonal_top_pair(self):
        m = csr_of(np.diag([1.0, 0.5, 0.0]))
        est = approx_max_eigvec(m, 1.0, 0.01, 0.1, np.random.default_rng(0))
        assert est.rayleigh >= 0.99
        assert abs(abs(est.vector[0]) - 1.0) < 1e-4
        assert np.linalg.norm(est.vector) == pytest.approx(1.0, abs=1e-10)

    def test_negative_identity(self):
        m = csr_of(-np.eye(2))
        est = approx_max_eigvec(m, 1.0, 0.1, 0.1, np.random.default_rng(0))
        assert est.rayleigh >= -1.0 - 1e-10
        assert est.rayleigh <= -1.0 + 1e-10
        assert np.linalg.norm(est.vector) == pytest.approx(1.0, abs=1e-10)

    def test_random_sparse_vs_dense(self):
        rng = np.random.default_rng(3)
        m = random_sparse_csr(50, rng, density=0.1)
        top = np.linalg.eigvalsh(m.to_dense())[-1]
        bound = float(m.abs_row_sums().max())
        est = approx_max_eigvec(m, bound, 1e-3, 0.05, rng)
        assert est.rayleigh >= top - 1e-3
        assert est.rayleigh <= top + 1e-10

    def test_rayleigh_matches_quad_form(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            m = random_sparse_csr(30, rng, density=0.3)
            bound = max(float(m.abs_row_sums().max()), 1e-6)
            est = approx_max_eigvec(m, bound, 1e-2, 0.1, rng)
            assert est.rayleigh == pytest.approx(m.quad(est.vector), abs=1e-10 * max(1.0, bound))

    def test_success_rate_small(self):
        # n <= 100: the iteration cap equals the dimension, so the Krylov
        # space is complete and every run must land within eps
        rng = np.random.default_rng(42)
        matrices = [
            random_sparse_csr(100, rng, density=0.05),
            csr_of(np.diag(np.linspace(-1.0, 1.0, 60))),
        ]
        for eps in (1e-2, 1e-4):
            for m in matrices:
                top = np.linalg.eigvalsh(m.to_dense())[-1]
                bound = max(float(m.abs_row_sums().max()), 1e-9)
                hits = sum(
                    approx_max_eigvec(m, bound, eps, 0.05, np.random.default_rng(s)).rayleigh
                    >= top - eps
                    for s in range(200)
                )
                assert hits >= 0.95 * 200

    def test_success_rate_subspace_regime(self):
        # n = 400 with loose eps: iteration count well below n, genuinely
        # probabilistic regime
        rng = np.random.default_rng(9)
        m = random_sparse_csr(400, rng, density=0.01)
        top = np.linalg.eigvalsh(m.to_dense())[-1]
        bound = float(m.abs_row_sums().max())
        delta = 0.2
        assert lanczos_iterations(bound, 0.05 * bound, delta, 400) < 400
        hits = sum(
            approx_max_eigvec(m, bound, 0.05 * bound, delta, np.random.default_rng(s)).rayleigh
            >= top - 0.05 * bound
            for s in range(100)
        )
        assert hits >= (1 - delta) * 100

    def test_matvec_budget(self):
        rng = np.random.default_rng(5)
        for n, eps, delta in ((50, 1e-2, 0.1), (200, 5e-2, 0.2), (30, 1e-4, 0.05)):
            m = random_sparse_csr(n, rng, density=0.1)
            bound = max(float(m.abs_row_sums().max()), 1e-9)
            counter = MatvecCounter()
            approx_max_eigvec(m, bound, eps, delta, rng, counter=counter)
            formula = LANCZOS_ITER_COEFF * np.sqrt(bound / eps) * np.log(4.0 * n / delta)
            assert counter.count <= formula

    def test_determinism(self):
        rng_a = np.random.default_rng(123)
        rng_b = np.random.default_rng(123)
        m = random_sparse_csr(40, np.random.default_rng(2), density=0.2)
        e1 = approx_max_eigvec(m, 5.0, 1e-3, 0.1, rng_a)
        e2 = approx_max_eigvec(m, 5.0, 1e-3, 0.1, rng_b)
        assert e1.rayleigh == e2.rayleigh
        assert np.array_equal(e1.vector, e2.vector)

    def test_validation(self):
        m = csr_of(np.eye(2))
        rng = np.random.default_rng(0)
        with pytest.raises(ValueError):
            approx_max_eigvec(m, 0.0, 1e-3, 0.1, rng)
        with pytest.raises(ValueError):
            approx_max_eigvec(m, 1.0, -1e-3, 0.1, rng)
        with pytest.raises(ValueError):
            approx_max_eigvec(m, 1.0, 1e-3, 1.5, rng)

    def test_contraction_is_psd_contraction(self):
        # the internal normalization H/(2L) + I/2 must be PSD with norm <= 1
        # whenever L bounds the spectral norm
        rng = np.random.default_rng(8)
        for _ in range(10):
            dense = random_symmetric_dense(12, rng)
            bound = float(np.abs(np.linalg.eigvalsh(dense)).max()) * 1.5
            shifted = ScaledShifted(csr_of(dense), 0.5 / bound, 0.5)
            w = np.linalg.eigvalsh(operator_dense(shifted))
            assert w[0] >= -1e-12
            assert w[-1] <= 1.0 + 1e-12


class TestSpectralNormUpper:
    def test_known_spectrum(self):
        m = csr_of(np.diag([3.0, -5.0]))
        nu = spectral_norm_upper(m, 0.1, np.random.default_rng(0))
        assert 5.0 <= nu <= 10.0

    def test_zero_matrix(self):
        m = csr_of(np.zeros((3, 3)))
        assert spectral_norm_upper(m, 0.1, np.random.default_rng(0)) == 0.0

    def test_bracket_random(self):
        failures = 0
        for seed in range(100):
            rng = np.random.default_rng(seed)
            dense = random_symmetric_dense(30, rng, density=0.4)
            true_norm = float(np.abs(np.linalg.eigvalsh(dense)).max())
            if true_norm == 0.0:
                continue
            nu = spectral_norm_upper(csr_of(dense), 0.05, rng)
            if not (true_norm - 1e-9 <= nu <= 2.0 * true_norm + 1e-9):
                failures += 1
        assert failures <= 5


class TestMinEigLower:
    def test_identity(self):
        mu = min_eig_lower(csr_of(np.eye(4)), 0.1, np.random.default_rng(0))
        assert 0.5 <= mu <= 1.0

    def test_known_spectrum(self):
        mu = min_eig_lower(csr_of(np.diag([4.0, 0.25])), 0.1, np.random.default_rng(0))
        assert 0.125 <= mu <= 0.25

    def test_bracket_random_spd(self):
        failures = 0
        for seed in range(100):
            rng = np.random.default_rng(seed)
            dense = random_spd_dense(20, rng)
            lam_min = float(np.linalg.eigvalsh(dense)[0])
            mu = min_eig_lower(csr_of(dense), 0.05, rng)
            if not (mu - 1e-9 <= lam_min <= 2.0 * mu + 1e-9):
                failures += 1
        assert failures <= 5

    def test_indefinite_rejected(self):
        m = csr_of(np.diag([1.0, -0.5]))
        with pytest.raises(NotPositiveDefiniteError):
            min_eig_lower(m, 0.1, np.random.default_rng(0))

    def test_zero_rejected(self):
        with pytest.raises(NotPositiveDefiniteError):
            min_eig_lower(csr_of(np.zeros((2, 2))), 0.1, np.random.default_rng(0))
