import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from services.corpus import random_unitary
from services.isometry import (
    defect_report,
    embeddability_report,
    is_misometry,
    isometry_order,
    kernel_condition_check,
    misometry_defect_operator,
    misometry_defect_vector,
    msymmetry_defect,
    msymmetry_defect_operator,
    power_norm_polynomial_check,
    power_pair_test,
    probe_operator,
    relative_defect,
    symmetry_order,
    top_eigenvector,
)
from services.matrix_core import matrix_exp
from services.semigroup import cogenerator, nilpotent_generator

TOL = 1e-8


def unipotent(n):
    """I + Q_n，严格 (2n-1)-等距"""
    return np.eye(n) + nilpotent_generator(n, n).A


@given(st.integers(min_value=1, max_value=5), st.integers(min_value=0, max_value=2 ** 32 - 1))
@settings(max_examples=25, deadline=None)
def test_unitary_is_isometry_of_every_order(dim, seed):
    U = random_unitary(np.random.default_rng(seed), dim)
    assert isometry_order(U, 4, TOL) == 1
    for m in range(1, 5):
        assert relative_defect(U, m) <= 1e-12


@pytest.mark.parametrize("n, order", [(2, 3), (3, 5), (4, 7)])
def test_unipotent_order(n, order):
    T = unipotent(n)
    assert isometry_order(T, 8, TOL) == order
    assert not is_misometry(T, order - 1, TOL)


def test_defect_vector_matches_operator(rng):
    T = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    x = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    for m in range(1, 5):
        D = misometry_defect_operator(T, m)
        assert_allclose(D, D.conj().T)
        assert misometry_defect_vector(T, m, x) == pytest.approx(np.vdot(x, D @ x).real, rel=1e-10)


def test_defect_report_witness():
    report = defect_report(np.diag([2.0, 1.0]), 1, TOL, m_max=3)
    assert not report.verdict
    assert_allclose(report.witness, [1, 0])
    assert report.defect_norm == pytest.approx(3)
    assert report.scale == pytest.approx(4)
    assert [m for m, _ in report.per_order_table] == [1, 2, 3]

    passing = defect_report(np.eye(2), 1, TOL)
    assert passing.verdict and passing.witness is None


def test_witness_phase_is_normalized(rng):
    X = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    v = top_eigenvector(X + X.conj().T)
    pivot = v[np.argmax(np.abs(v))]
    assert pivot.imag == pytest.approx(0, abs=1e-15)
    assert pivot.real > 0
    assert np.linalg.norm(v) == pytest.approx(1)


def test_probe_operator_reports_failure_at_m_max():
    report = probe_operator(2 * np.eye(2), 4, TOL)
    assert report.order_tested == 4
    assert not report.verdict
    assert probe_operator(unipotent(2), 4, TOL).order_tested == 3


def test_power_norm_polynomial():
    T = unipotent(3)
    x = np.ones(3)
    assert power_norm_polynomial_check(T, x, 5, 12)
    assert not power_norm_polynomial_check(T, x, 4, 12)
    with pytest.raises(ValueError):
        power_norm_polynomial_check(T, x, 5, 6)


def test_invalid_order():
    with pytest.raises(ValueError):
        relative_defect(np.eye(2), 0)


def test_cogenerator_of_nilpotent_is_strict():
    for n in (2, 3, 4):
        V = cogenerator(nilpotent_generator(n, n))
        assert isometry_order(V, 8, TOL) == 2 * n - 1


def test_symmetry_order():
    H = np.array([[1, 2 - 1j], [2 + 1j, -3]])
    assert symmetry_order(H, 4, TOL) == 1
    B = -1j * nilpotent_generator(2, 2).A
    assert symmetry_order(B, 5, TOL) == 3
    assert np.linalg.norm(msymmetry_defect_operator(B, 3)) == 0
    assert msymmetry_defect(B, 2, [0, 1]) == pytest.approx(-2)


FORWARD_SHIFT_3 = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0]])


@pytest.mark.parametrize(
    "T, expected",
    [
        (np.eye(3), True),
        (FORWARD_SHIFT_3, True),
        (np.array([[0, 0, 0], [1, 0, 0], [1, 1, 0]]), False),
    ],
)
def test_kernel_condition(T, expected):
    assert kernel_condition_check(T) is expected


def test_embeddability(rng):
    U = random_unitary(rng, 3)
    report = embeddability_report(U)
    assert report.embeddable and report.is_normal and report.spectrum_on_unit_circle
    assert_allclose(matrix_exp(report.generator), U, atol=1e-10)

    singular = embeddability_report(np.array([[0, 0], [1, 0]]))
    assert not singular.embeddable
    assert singular.ker_dim == 1 and singular.coker_dim == 1
    assert singular.generator is None

    cut = embeddability_report(np.diag([1.0, -1.0]))
    assert cut.embeddable and cut.branch_cut
    assert cut.generator is None


def test_embeddability_of_forward_shift():
    report = embeddability_report(FORWARD_SHIFT_3)
    assert not report.embeddable
    assert report.ker_dim == 1 and report.coker_dim == 1
    assert report.generator is None


def test_embeddability_unipotent_generator():
    report = embeddability_report([[1, 1], [0, 1]])
    assert report.embeddable
    assert_allclose(report.generator, [[0, 1], [0, 0]], atol=1e-12)


def test_embeddability_uses_absolute_singular_value_threshold():
    tiny = embeddability_report(1e-13 * np.eye(2), 1e-12)
    assert not tiny.embeddable
    assert tiny.ker_dim == 2 and tiny.generator is None

    wide = embeddability_report(np.diag([1e6, 1e-7]), 1e-12)
    assert wide.embeddable
    assert wide.ker_dim == 0 and wide.coker_dim == 0
    assert_allclose(wide.generator, np.diag([np.log(1e6), np.log(1e-7)]), rtol=1e-10)


def test_random_invertible_matrices_embed(rng):
    for _ in range(20):
        T = 4 * np.eye(4) + (rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))) / np.sqrt(2)
        report = embeddability_report(T)
        assert report.embeddable and not report.branch_cut
        assert np.linalg.norm(matrix_exp(report.generator) - T, 2) <= 1e-8 * np.linalg.norm(T, 2)


@pytest.mark.parametrize(
    "T",
    [
        FORWARD_SHIFT_3,
        np.array([[1, 1, 0], [0, 1, 1], [0, 0, 1]]),
        np.diag([2.0, 0.5, 1e-13]),
        np.diag([1.0, -1.0, 2.0]),
    ],
)
def test_embeddability_invariant_under_unitary_similarity(T, rng):
    U = random_unitary(rng, 3)
    assert embeddability_report(U.conj().T @ T @ U).embeddable == embeddability_report(T).embeddable


def test_defect_recurrence(rng):
    for _ in range(10):
        T = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        T /= np.linalg.norm(T, 2)
        for m in range(1, 6):
            D = misometry_defect_operator(T, m)
            assert_allclose(misometry_defect_operator(T, m + 1), T.conj().T @ D @ T - D, atol=1e-10)


def test_defect_vector_consistency_sweep(rng):
    for _ in range(200):
        m = int(rng.integers(1, 6))
        T = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        T /= np.linalg.norm(T, 2)
        x = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        expected = np.vdot(x, misometry_defect_operator(T, m) @ x).real
        assert misometry_defect_vector(T, m, x) == pytest.approx(expected, abs=1e-10 * np.vdot(x, x).real)


@pytest.mark.parametrize(
    "T, order",
    [
        (unipotent(2), 3),
        (unipotent(3), 5),
        (cogenerator(nilpotent_generator(2, 2)), 3),
        (np.diag([1j, -1, np.exp(0.3j)]), 1),
    ],
)
def test_powers_keep_isometry_order(T, order):
    assert isometry_order(T, 8, TOL) == order
    for r in (2, 3):
        assert isometry_order(np.linalg.matrix_power(T, r), 8, TOL) <= order


def test_power_pair():
    report = power_pair_test(unipotent(2), 2, 3, TOL)
    assert report.pass_r and report.pass_r_plus_1 and report.pass_base
    report = power_pair_test(unipotent(2), 2, 2, TOL)
    assert not (report.pass_r or report.pass_base)
    with pytest.raises(ValueError):
        power_pair_test(np.eye(2), 0, 1, TOL)
