import numpy as np
import pytest
from numpy.testing import assert_allclose

from exceptions import BranchCut, DimensionMismatch, MisoError, SingularMatrix
from services.corpus import random_unitary
from services.matrix_core import (
    adjoint,
    as_matrix,
    as_vector,
    eigenvalues,
    kernel,
    matrix_exp,
    matrix_log_principal,
    matrix_powers,
    operator_norm,
    spectral_radius,
)


def test_as_matrix_rejects_bad_shapes():
    with pytest.raises(DimensionMismatch):
        as_matrix([[1, 2, 3], [4, 5, 6]])
    with pytest.raises(DimensionMismatch):
        as_matrix([1, 2])
    with pytest.raises(ValueError):
        as_matrix([[np.nan]])
    assert as_matrix([[1, 2, 3]], square=False).shape == (1, 3)


def test_as_vector_dimension_check():
    with pytest.raises(DimensionMismatch):
        as_vector([1, 2], dim=3)
    assert isinstance(DimensionMismatch("x"), MisoError)


def test_adjoint_and_norm():
    M = np.array([[1, 2j], [0, 3]])
    assert_allclose(adjoint(M), M.conj().T)
    assert operator_norm(np.diag([3, -4])) == pytest.approx(4)


def test_matrix_powers():
    M = np.array([[1, 1], [0, 1]])
    powers = matrix_powers(M, 3)
    assert len(powers) == 4
    assert_allclose(powers[0], np.eye(2))
    assert_allclose(powers[3], [[1, 3], [0, 1]])


def test_kernel_dimension():
    M = np.array([[1, 0, 0], [0, 0, 0], [0, 0, 0]])
    K = kernel(M, 1e-12)
    assert K.dimension == 2
    assert K.ambient_dimension == 3
    assert_allclose(M @ K.basis, 0, atol=1e-14)
    assert kernel(np.eye(3), 1e-12).dimension == 0
    with pytest.raises(ValueError):
        kernel(M, 0)


def test_eigenvalues_and_spectral_radius(rng):
    U = random_unitary(rng, 3)
    M = U @ np.diag([2, 1j, -0.5]) @ U.conj().T
    assert_allclose(np.sort_complex(eigenvalues(M)), np.sort_complex(np.array([2, 1j, -0.5])), atol=1e-12)
    assert spectral_radius(M) == pytest.approx(2)


def test_matrix_exp_of_nilpotent():
    Q = np.array([[0, 1], [0, 0]])
    assert_allclose(matrix_exp(2 * Q), [[1, 2], [0, 1]], atol=1e-15)


def test_log_roundtrip(rng):
    U = random_unitary(rng, 4)
    M = U @ np.diag([1.5, 0.5 + 1j, 2j, 0.3]) @ U.conj().T
    L = matrix_log_principal(M)
    assert_allclose(matrix_exp(L), M, atol=1e-12)
    assert np.all(np.abs(eigenvalues(L).imag) < np.pi)


def test_log_of_unitary_is_skew_hermitian(rng):
    U = random_unitary(rng, 3)
    L = matrix_log_principal(U)
    assert_allclose(L, -L.conj().T, atol=1e-10)


def test_log_rejects_singular_and_branch_cut():
    with pytest.raises(SingularMatrix):
        matrix_log_principal(np.diag([1.0, 0.0]))
    with pytest.raises(BranchCut):
        matrix_log_principal(np.diag([1.0, -2.0]))
    with pytest.raises(np.linalg.LinAlgError):
        matrix_log_principal(np.diag([-1.0, 1.0]))


def random_complex(rng, n):
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


def test_exp_semigroup_law(rng):
    for _ in range(20):
        A = random_complex(rng, 4) / 2
        s, t = rng.uniform(0, 2, size=2)
        total = matrix_exp((s + t) * A)
        residual = np.linalg.norm(total - matrix_exp(s * A) @ matrix_exp(t * A), 2)
        assert residual <= 1e-10 * (1 + np.linalg.norm(total, 2))


def test_log_inverts_exp_on_small_matrices(rng):
    for _ in range(20):
        M = random_complex(rng, 4)
        M *= rng.uniform(0.1, 2) / np.linalg.norm(M, 2)
        assert np.linalg.norm(matrix_log_principal(matrix_exp(M)) - M, 2) <= 1e-8


def test_kernel_is_orthogonal_to_row_space(rng):
    M = random_complex(rng, 5)
    M[:, 3:] = M[:, :2] @ random_complex(rng, 2)[:, :2]
    K = kernel(M, 1e-12)
    assert K.dimension == 2
    assert np.linalg.norm(M @ K.basis, 2) <= 1e-10 * np.linalg.norm(M, 2)
