"""Linear algebra kernels against scipy and direct reconstruction."""

import numpy as np
import pytest
import scipy.linalg

import seqmps
from seqmps import InvalidInputError

from oracles import PAULI


def random_complex(shape, seed):
    rng = np.random.default_rng(seed)
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


@pytest.mark.parametrize("shape", [(4, 4), (6, 3), (3, 6), (1, 5), (5, 1)])
def test_svd_reconstructs_and_orders(shape):
    a = random_complex(shape, 7)
    f = seqmps.svd(a)
    assert np.abs(f.u @ np.diag(f.s) @ f.vdag - a).max() < 1e-12
    assert np.all(np.diff(f.s) <= 0.0)
    assert np.all(f.s >= 0.0)
    k = f.s.size
    assert np.abs(f.u.conj().T @ f.u - np.eye(k)).max() < 1e-12
    assert np.abs(f.vdag @ f.vdag.conj().T - np.eye(k)).max() < 1e-12


def test_svd_rank_counts_significant_values():
    u = seqmps.haar_unitary(5, np.random.default_rng(0))
    s = np.array([1.0, 0.5, 1e-3, 1e-14, 0.0])
    a = (u * s) @ seqmps.haar_unitary(5, np.random.default_rng(1))
    assert seqmps.svd(a).rank() == 3
    assert seqmps.svd(np.zeros((3, 3))).rank() == 0


def test_svd_rejects_bad_input():
    with pytest.raises(InvalidInputError):
        seqmps.svd(np.ones(4))
    with pytest.raises(InvalidInputError):
        seqmps.svd(np.array([[1.0, np.nan], [0.0, 1.0]]))


def test_eigh_matches_scipy():
    a = random_complex((6, 6), 3)
    h = a + a.conj().T
    w, v = seqmps.eigh(h)
    assert np.all(np.diff(w) >= 0.0)
    assert np.abs((v * w) @ v.conj().T - h).max() < 1e-12
    assert np.abs(np.sort(w) - np.sort(scipy.linalg.eigvalsh(h))).max() < 1e-12


def test_eigh_rejects_non_hermitian():
    with pytest.raises(InvalidInputError):
        seqmps.eigh(np.array([[0.0, 1.0], [0.0, 0.0]]))


@pytest.mark.parametrize("scale", [1.0, 0.37, -2.0])
def test_expm_hermitian_matches_scipy_expm(scale):
    a = random_complex((5, 5), 11)
    h = a + a.conj().T
    u = seqmps.expm_hermitian(h, scale=scale)
    ref = scipy.linalg.expm(-1j * scale * h)
    assert np.abs(u - ref).max() < 1e-12
    assert np.abs(u.conj().T @ u - np.eye(5)).max() < 1e-13


def test_procrustes_beats_random_unitaries():
    # The closed-form maximizer of Re tr(u @ env) must dominate a large
    # random sample and attain exactly sum of singular values.
    env = random_complex((4, 4), 5)
    u = seqmps.procrustes_unitary(env)
    assert np.abs(u.conj().T @ u - np.eye(4)).max() < 1e-12
    attained = np.trace(u @ env).real
    assert abs(attained - seqmps.svd(env).s.sum()) < 1e-12
    rng = np.random.default_rng(17)
    for _ in range(1000):
        trial = seqmps.haar_unitary(4, rng)
        assert np.trace(trial @ env).real <= attained + 1e-10


def test_procrustes_requires_square():
    with pytest.raises(InvalidInputError):
        seqmps.procrustes_unitary(np.ones((2, 3)))


def test_unitary_completion_preserves_columns():
    iso = seqmps.haar_unitary(6, np.random.default_rng(2))[:, :2]
    u = seqmps.unitary_completion(iso)
    assert u.shape == (6, 6)
    assert np.abs(u[:, :2] - iso).max() == 0.0
    assert np.abs(u.conj().T @ u - np.eye(6)).max() < 1e-12


def test_unitary_completion_rejects_non_orthonormal():
    with pytest.raises(InvalidInputError):
        seqmps.unitary_completion(np.ones((3, 2)))


def test_haar_unitary_is_deterministic_and_unitary():
    a = seqmps.haar_unitary(4, np.random.default_rng(42))
    b = seqmps.haar_unitary(4, np.random.default_rng(42))
    assert np.array_equal(a, b)
    assert np.abs(a.conj().T @ a - np.eye(4)).max() < 1e-12


def test_pauli_coefficients_invert_the_expansion():
    rng = np.random.default_rng(9)
    table = rng.standard_normal((4, 4))
    h = np.zeros((4, 4), dtype=complex)
    for j in range(4):
        for k in range(4):
            h += table[j, k] * np.kron(PAULI[j], PAULI[k])
    back = seqmps.pauli_coefficients(h)
    assert np.abs(back - table).max() < 1e-12
