import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from config import ProbeConfig
from exceptions import ResolventViolation
from schemas import TrajectorySample
from services.corpus import generator_corpus, random_unitary, skew_hermitian
from services.isometry import isometry_order
from services.semigroup import (
    GeneratorSemigroup,
    bound_report,
    cayley_identity,
    check_semigroup_m_isometry,
    cogenerator,
    cogenerator_series,
    difference_residual,
    evolve,
    generator_condition,
    generator_condition_operator,
    group_two_point_test,
    interval_test,
    msymmetric_generator,
    nilpotent_generator,
    polynomial_degree,
    probe_vectors,
    sample_trajectory,
    semigroup_order,
)

TOL = 1e-8
CORPUS = generator_corpus(20240517)


def test_evolve_matches_expm(rng):
    A = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    G = GeneratorSemigroup(A)
    from scipy.linalg import expm

    for t in (0.0, 0.3, 1.7):
        assert_allclose(G.evolve(t), expm(t * A), atol=1e-12)
    assert_allclose(evolve(A, 0.5) @ evolve(A, 0.25), G.evolve(0.75), atol=1e-12)
    assert G.dim == 3
    with pytest.raises(ValueError):
        G.A[0, 0] = 1


def test_nilpotent_generator_embedding():
    G = nilpotent_generator(2, 3)
    assert G.A.shape == (3, 3)
    assert G.A[0, 1] == 1 and np.count_nonzero(G.A) == 1
    with pytest.raises(ValueError):
        nilpotent_generator(1, 3)
    with pytest.raises(ValueError):
        nilpotent_generator(4, 3)


@pytest.mark.parametrize("item", CORPUS, ids=[item.name for item in CORPUS])
def test_corpus_sweep(item, sweep_config):
    G = GeneratorSemigroup(item.A)
    for m in range(1, 8):
        conditions = check_semigroup_m_isometry(G, m, sweep_config)
        assert conditions.agree, (m, conditions.verdicts)
        expected = item.order is not None and m >= item.order
        assert conditions.all_pass == expected, (m, conditions.verdicts)


@pytest.mark.parametrize("item", CORPUS, ids=[item.name for item in CORPUS])
def test_cogenerator_order_matches_semigroup(item):
    V = cogenerator(item.A)
    assert isometry_order(V, 8, TOL) == item.order


def test_failed_condition_has_witness(sweep_config):
    conditions = check_semigroup_m_isometry(nilpotent_generator(3, 3), 3, sweep_config)
    assert conditions.verdicts == (False, False, False, False)
    for verdict in (conditions.cond_i, conditions.cond_ii, conditions.cond_iii, conditions.cond_iv):
        assert verdict.witness is not None
        assert np.linalg.norm(verdict.witness) == pytest.approx(1)


def test_semigroup_order(sweep_config):
    assert semigroup_order(nilpotent_generator(3, 3), 7, sweep_config) == 5
    assert semigroup_order(np.diag([0.5, -1.0]), 4, sweep_config) is None


@pytest.mark.parametrize("n", [2, 3, 4])
def test_nilpotent_strictness(n, sweep_config):
    G = nilpotent_generator(n, n)
    assert check_semigroup_m_isometry(G, 2 * n - 1, sweep_config).all_pass
    assert not check_semigroup_m_isometry(G, 2 * n - 2, sweep_config).cond_iii.passed


def test_cogenerator_series_matches_resolvent():
    for n in (2, 3, 4, 5):
        Q = nilpotent_generator(n, n).A
        assert_allclose(cogenerator(Q), cogenerator_series(Q, n), atol=1e-12)
    with pytest.raises(ValueError):
        cogenerator_series(np.zeros((2, 2)), 1)


def test_cogenerator_rejects_one_in_spectrum():
    with pytest.raises(ResolventViolation):
        cogenerator(np.diag([1.0, 2.0]))
    with pytest.raises(np.linalg.LinAlgError):
        cogenerator(np.eye(2))


def test_cogenerator_of_skew_hermitian_is_unitary(rng):
    V = cogenerator(skew_hermitian(rng, 4))
    assert_allclose(V.conj().T @ V, np.eye(4), atol=1e-12)


def test_cayley_identity():
    rng = np.random.default_rng(7)
    for _ in range(200):
        dim = int(rng.integers(1, 5))
        m = int(rng.integers(1, 6))
        A = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        x = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        identity = cayley_identity(A, m, x)
        assert identity.discrepancy <= 1e-10
        assert abs(identity.lhs.imag) <= 1e-10 * max(1.0, identity.scale)


def test_generator_condition_operator_matches_vector_form(rng):
    A = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    x = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    C = generator_condition_operator(A, 3)
    assert generator_condition(A, 3, x) == pytest.approx(np.vdot(x, C @ x), rel=1e-10)
    with pytest.raises(ValueError):
        generator_condition(A, 0, x)


def test_sample_and_degree():
    G = nilpotent_generator(2, 2)
    sample = sample_trajectory(G, [0, 1], 2.0, 9)
    # ||e^{tQ} e_2||^2 = 1 + t^2
    assert_allclose(sample.values, 1 + sample.t_grid ** 2, rtol=1e-14)
    assert polynomial_degree(sample, 4, TOL) == 2
    assert polynomial_degree(sample, 1, TOL) is None
    assert sample.step == pytest.approx(0.25)
    with pytest.raises(ValueError):
        polynomial_degree(sample, 8, TOL)
    with pytest.raises(ValueError):
        sample_trajectory(G, [0, 1], 0.0, 9)
    with pytest.raises(ValueError):
        sample_trajectory(G, [0, 1], 1.0, 3)


@given(st.lists(st.floats(min_value=-5, max_value=5), min_size=1, max_size=4))
@settings(max_examples=50, deadline=None)
def test_degree_of_exact_polynomial(coefficients):
    t = np.linspace(0.0, 2.0, 17)
    values = np.polyval(coefficients, t) ** 2 + 1
    sample = TrajectorySample(t_grid=t, values=values, x=[1.0])
    degree = polynomial_degree(sample, 8, 1e-9)
    assert degree is not None
    assert degree <= 2 * (len(coefficients) - 1)


def test_difference_residual_edge_cases():
    assert difference_residual([0.0, 0.0, 0.0], 1) == 0.0
    assert difference_residual([1.0, 2.0], 3) == 0.0
    assert difference_residual([1.0, 2.0, 4.0], 2) == pytest.approx(0.25)


def test_probe_vectors():
    probes = list(probe_vectors(3))
    assert len(probes) == 3 + 2 * 3
    assert_allclose(probes[4], [1, 1j, 0])


def test_bound_report():
    report = bound_report(np.diag([0.5, -1.0]), 2.0)
    assert report.spectral_bound == pytest.approx(0.5)
    assert report.growth_estimate == pytest.approx(0.5)
    assert report.contract_holds
    with pytest.raises(ValueError):
        bound_report(np.eye(2), 0.0)


def test_msymmetric_generator(sweep_config):
    B = -1j * nilpotent_generator(2, 2).A
    G = msymmetric_generator(B)
    assert check_semigroup_m_isometry(G, 3, sweep_config).all_pass
    report = group_two_point_test(G, 3, np.sqrt(2), np.pi / 3, TOL)
    assert report.pass_t1 and report.pass_t2 and report.pass_grid


def test_group_two_point_detects_failure():
    report = group_two_point_test(np.diag([0.5, -0.5]), 1, 1.0, np.sqrt(2), TOL)
    assert not (report.pass_t1 or report.pass_t2 or report.pass_grid)


def test_interval_test():
    G = nilpotent_generator(2, 2)
    assert interval_test(G, 3, 0.5, 1.5, 9, TOL)
    assert not interval_test(G, 2, 0.5, 1.5, 9, TOL)
    with pytest.raises(ValueError):
        interval_test(G, 3, 1.0, 0.5, 9, TOL)


def test_conditions_with_unitary_conjugation(rng, sweep_config):
    U = random_unitary(rng, 3)
    A = U @ nilpotent_generator(2, 3).A @ U.conj().T
    assert check_semigroup_m_isometry(A, 3, sweep_config).all_pass
    assert not check_semigroup_m_isometry(A, 2, sweep_config).all_pass


def test_default_config_is_accepted():
    conditions = check_semigroup_m_isometry(nilpotent_generator(2, 2), 3, ProbeConfig())
    assert conditions.all_pass


@pytest.mark.parametrize(
    "A, order",
    [
        (nilpotent_generator(2, 2).A, 3),
        (nilpotent_generator(3, 3).A, 5),
        (skew_hermitian(np.random.default_rng(7), 3), 1),
        (np.diag([0.25, -0.25]), None),
    ],
)
@pytest.mark.parametrize("m", [1, 2, 3, 4, 5])
def test_interval_verdict_matches_whole_window(A, order, m):
    on_interval = interval_test(A, m, 0.5, 1.5, 9, TOL)
    assert on_interval == interval_test(A, m, 0.0, 1.5, 13, TOL)
    assert on_interval == (order is not None and m >= order)
