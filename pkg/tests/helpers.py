"""Shared instance generators for the test suite."""

import numpy as np

from trsolve.sparse import SymmetricCSR


def random_symmetric_dense(n, rng, density=1.0, scale=1.0):
    a = rng.standard_normal((n, n)) * scale
    a = 0.5 * (a + a.T)
    if density < 1.0:
        keep = np.triu(rng.random((n, n)) < density)
        mask = keep | keep.T
        a = np.where(mask, a, 0.0)
    return a


def random_spd_dense(n, rng, eig_low=0.2, eig_high=3.0):
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    d = rng.uniform(eig_low, eig_high, size=n)
    m = (q * d) @ q.T
    return 0.5 * (m + m.T)


def csr_of(dense):
    return SymmetricCSR.from_dense(np.asarray(dense, dtype=float))


def random_sparse_csr(n, rng, density=0.1, scale=1.0):
    return csr_of(random_symmetric_dense(n, rng, density=density, scale=scale))


def dense_eig_bounds(dense):
    w = np.linalg.eigvalsh(dense)
    return float(w[0]), float(w[-1])


def planted_pair(n, eps, rng):
    """Constraint pair with a planted witness giving both margins at least 2*eps.

    X* = (v v' + w w') / 2 for orthonormal v, w; each constraint is a small
    random symmetric part plus enough of (v v' + w w') to clear the margin,
    keeping the spectral norm at most one.
    """
    basis, _ = np.linalg.qr(rng.standard_normal((n, 2)))
    v, w = basis[:, 0], basis[:, 1]
    plant = np.outer(v, v) + np.outer(w, w)
    mats = []
    for _ in range(2):
        g = random_symmetric_dense(n, rng)
        g *= 0.25 / max(np.abs(np.linalg.eigvalsh(g)).max(), 1e-12)
        planted_value = float(v @ g @ v + w @ g @ w) / 2.0
        tau = np.clip(2.0 * eps - planted_value, 0.0, 0.5)
        mats.append(g + tau * plant)
    x_star = 0.5 * plant
    return csr_of(mats[0]), csr_of(mats[1]), x_star
