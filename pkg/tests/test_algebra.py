import cmath

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from honeystab.algebra import (EPS_ALG, METRIC, SIGMA0, SIGMA1, SIGMA2, SIGMA3,
                               SingularTransformError, StabilizerElement, _exp_minus_i,
                               anticommutator, clifford_residual, conjugate, exp_generator,
                               from_sigma_coefficients, gamma_set, inverse, lorentz_action,
                               pauli, sigma_action, sigma_coefficients)


def series_exp(m, terms=60):
    """Oracle: truncated power series of the matrix exponential."""
    out = np.eye(2, dtype=complex)
    term = np.eye(2, dtype=complex)
    for n in range(1, terms):
        term = term @ m / n
        out = out + term
    return out


def a_sigma(a):
    return a[0] * SIGMA1 + a[1] * SIGMA2 + a[2] * SIGMA3


finite = st.floats(-2.0, 2.0, allow_nan=False)
generators = st.tuples(finite, finite, finite, finite, finite, finite).map(
    lambda t: np.array([t[0] + 1j * t[1], t[2] + 1j * t[3], t[4] + 1j * t[5]]) / np.sqrt(3))


def test_pauli_standard_forms():
    assert np.allclose(pauli(3), np.diag([1, -1]))
    assert np.allclose(pauli(1) @ pauli(2), 1j * pauli(3))
    assert np.allclose(anticommutator(pauli(1), pauli(3)), 0)


@pytest.mark.parametrize("bad", [0, 4, -1])
def test_pauli_rejects_bad_index(bad):
    with pytest.raises(ValueError):
        pauli(bad)


def test_pauli_returns_copy():
    p = pauli(1)
    p[0, 0] = 7
    assert pauli(1)[0, 0] == 0


def test_gamma_set_structure():
    g = gamma_set()
    assert np.allclose(g.gamma1, 1j * SIGMA2)
    assert np.allclose(g.gamma0 @ g.gamma0, SIGMA0)
    assert np.allclose(g.gamma1 @ g.gamma1, -SIGMA0)
    assert np.allclose(g.gamma2 @ g.gamma2, -SIGMA0)
    assert g.clifford_residual() < EPS_ALG


def test_clifford_residual_detects_wrong_metric():
    assert clifford_residual(gamma_set().matrices, np.eye(3)) > 1.0


def test_exp_generator_zero_is_identity():
    assert np.allclose(exp_generator([0, 0, 0]).matrix, SIGMA0)


def test_rotation_matches_series_and_closed_form():
    theta = 0.83
    s = exp_generator([0, theta / 2, 0]).matrix
    assert np.allclose(s, np.cos(theta / 2) * SIGMA0 - 1j * np.sin(theta / 2) * SIGMA2, atol=1e-14)
    assert np.allclose(s, series_exp(-1j * theta / 2 * SIGMA2), atol=1e-14)
    assert np.allclose(s.conj().T @ s, SIGMA0, atol=1e-14)


def test_boost_generator_is_hyperbolic():
    phi = 1.3
    s = exp_generator([0, 0.5j * phi, 0]).matrix
    assert np.allclose(s, np.cosh(phi / 2) * SIGMA0 + np.sinh(phi / 2) * SIGMA2, atol=1e-14)
    assert np.allclose(s, StabilizerElement.boost(phi).matrix, atol=1e-15)


@settings(max_examples=60, deadline=None)
@given(generators)
def test_exp_generator_matches_series(a):
    s = exp_generator(a)
    assert np.allclose(s.matrix, series_exp(-1j * a_sigma(a)), atol=1e-11)
    assert abs(np.linalg.det(s.matrix) - 1) < EPS_ALG


@settings(max_examples=40, deadline=None)
@given(generators)
def test_exp_is_branch_independent(a):
    z = cmath.sqrt(complex(a @ a))
    if abs(z) < 1e-6:
        return
    assert np.allclose(_exp_minus_i(a, root=z), _exp_minus_i(a, root=-z), atol=1e-12)


def test_nilpotent_generator_truncates_exactly():
    a = np.array([1.0, 1j, 0.0])  # a.a = 0
    s = exp_generator(a).matrix
    assert np.allclose(s, SIGMA0 - 1j * a_sigma(a), atol=1e-15)


def test_conjugate_identity_and_published_cases():
    m = np.array([[1, 2j], [3, -4]], dtype=complex)
    assert np.allclose(conjugate(SIGMA0, m), m)
    theta, phi = 0.7, 0.9
    r = StabilizerElement.rotation(theta)
    assert np.allclose(conjugate(r, SIGMA3), np.cos(theta) * SIGMA3 - np.sin(theta) * SIGMA1)
    b = StabilizerElement.boost(phi)
    assert np.allclose(conjugate(b, SIGMA3), np.cosh(phi) * SIGMA3 - 1j * np.sinh(phi) * SIGMA1)


def test_conjugate_rejects_singular():
    with pytest.raises(SingularTransformError):
        conjugate(np.array([[1, 1], [1, 1]]), SIGMA1)
    with pytest.raises(SingularTransformError):
        inverse(np.zeros((2, 2)))


def test_element_validates_determinant_and_unitarity():
    with pytest.raises(ValueError):
        StabilizerElement(2 * SIGMA0, "general", np.zeros(3))
    with pytest.raises(ValueError):
        StabilizerElement(StabilizerElement.boost(1.0).matrix, "rotation", np.zeros(3))
    with pytest.raises(ValueError):
        StabilizerElement.boost(1.0, axis=3)


def test_sigma_action_rotation_is_real_13_rotation():
    theta = 0.4
    r = sigma_action(StabilizerElement.rotation(theta))
    expected = np.array([[np.cos(theta), 0, np.sin(theta)],
                         [0, 1, 0],
                         [-np.sin(theta), 0, np.cos(theta)]])
    assert np.allclose(r, expected, atol=1e-14)


def test_sigma_action_boost_has_imaginary_sinh():
    phi = 0.6
    r = sigma_action(StabilizerElement.boost(phi))
    assert np.allclose(r[2], [-1j * np.sinh(phi), 0, np.cosh(phi)])
    assert np.allclose(r[0], [np.cosh(phi), 0, 1j * np.sinh(phi)])


def test_lorentz_action_boost_is_real():
    phi = 0.6
    lam = lorentz_action(StabilizerElement.boost(phi))
    assert np.max(np.abs(lam.imag)) < EPS_ALG
    expected = np.array([[np.cosh(phi), 0, np.sinh(phi)],
                         [0, 1, 0],
                         [np.sinh(phi), 0, np.cosh(phi)]])
    assert np.allclose(lam, expected, atol=1e-14)


def test_lorentz_action_rotation_is_complex_but_orthogonal():
    lam = lorentz_action(StabilizerElement.rotation(0.5))
    assert np.max(np.abs(lam.imag)) > 0.1
    assert np.allclose(lam.T @ METRIC @ lam, METRIC, atol=EPS_ALG)


def test_identity_actions():
    assert np.allclose(sigma_action(SIGMA0), np.eye(3))
    assert np.allclose(lorentz_action(SIGMA0), np.eye(3))


@settings(max_examples=60, deadline=None)
@given(generators, generators)
def test_actions_orthogonal_and_group_law(a, b):
    s1, s2 = exp_generator(a), exp_generator(b)
    r1, r2 = sigma_action(s1), sigma_action(s2)
    assert np.allclose(r1.T @ r1, np.eye(3), atol=1e-10)
    lam = lorentz_action(s1)
    assert np.allclose(lam.T @ METRIC @ lam, METRIC, atol=1e-10)
    assert np.allclose(sigma_action(s1.matrix @ s2.matrix), r1 @ r2, atol=1e-10)


@settings(max_examples=60, deadline=None)
@given(generators, st.tuples(finite, finite, finite))
def test_conjugate_reconstruction_from_sigma_action(a, c):
    s = exp_generator(a)
    m = from_sigma_coefficients(np.array(c, dtype=complex))
    direct = conjugate(s, m)
    rebuilt = from_sigma_coefficients(np.array(c) @ sigma_action(s))
    assert np.allclose(direct, rebuilt, atol=1e-10)


@settings(max_examples=60, deadline=None)
@given(generators)
def test_clifford_preserved_under_conjugation(a):
    s = exp_generator(a)
    gammas = [conjugate(s, g) for g in gamma_set().matrices]
    scale = max(1.0, np.max(np.abs(s.matrix)) ** 4)
    assert clifford_residual(gammas) < 1e-12 * scale


def test_sigma_coefficients_roundtrip():
    m = np.array([[1 + 2j, -3], [0.5j, 4]])
    assert np.allclose(from_sigma_coefficients(sigma_coefficients(m)), m)
