import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from honeystab.algebra import SIGMA0, SIGMA2, SIGMA3, SingularTransformError, StabilizerElement
from honeystab.lattice import KineticVector, LatticeModel, bloch_at_k
from honeystab.ptsym import (PTContext, base_family, first_order_potential, metric_drift,
                             metric_operator, pseudo_hermiticity_residual, pt_odd_perturbation,
                             pt_potential, pt_residual, potential_family, sample_kinetic,
                             site_metric, spectral_reality_report, transformed_family)
from honeystab.realspace import assemble
from honeystab.stabilizer import boosted_couplings, rotated_couplings, transform_bloch

PHIS = [-2.0, -1.0, -0.5, -0.1, 0.1, 0.5, 1.0, 2.0]


def taylor_expm(a, terms=30):
    """Oracle: scaled-and-squared truncated Taylor series."""
    norm = np.linalg.norm(a, 1)
    squarings = max(0, int(np.ceil(np.log2(norm))) + 1) if norm > 0 else 0
    b = a / 2 ** squarings
    out = np.eye(a.shape[0], dtype=complex)
    term = np.eye(a.shape[0], dtype=complex)
    for n in range(1, terms):
        term = term @ b / n
        out = out + term
    for _ in range(squarings):
        out = out @ out
    return out


def test_context_involutions():
    ctx = PTContext()
    h = lambda pi: np.array([[pi[0], 1j * pi[1]], [2.0, -pi[0] * pi[1]]], dtype=complex)  # noqa: E731
    pi = KineticVector(0.3, -1.2)
    assert np.allclose(ctx.parity(ctx.parity(h))(pi), h(pi))
    assert np.allclose(ctx.time_reversal(ctx.time_reversal(h))(pi), h(pi))
    assert np.allclose(ctx.parity(ctx.time_reversal(h))(pi), ctx.time_reversal(ctx.parity(h))(pi))


@pytest.mark.parametrize("geo", ["chain", "honeycomb"])
def test_base_and_boosted_families_are_pt_symmetric(geo):
    m = LatticeModel(geo, 1.0, 0.5, 0.2)
    assert pt_residual(base_family(m)) < 1e-12
    for phi in PHIS:
        assert pt_residual(transformed_family(StabilizerElement.boost(phi), m)) < 1e-12


def test_identity_perturbation_breaks_symmetry():
    f = base_family(LatticeModel("chain", 1.0, 0.5))
    assert np.isclose(pt_residual(lambda pi: f(pi) + 1j * SIGMA0), 2.0)


@pytest.mark.parametrize("seed", range(5))
def test_random_odd_perturbation_detected(seed):
    f = transformed_family(StabilizerElement.boost(0.7), LatticeModel("honeycomb", 1.0, 0.3))
    x = pt_odd_perturbation(0.1, seed)
    assert np.isclose(np.linalg.norm(x, 2), 0.1)
    assert pt_residual(lambda pi: f(pi) + x) >= 0.05


def test_metric_operator_examples():
    assert np.allclose(metric_operator(StabilizerElement.rotation(0.8)), SIGMA0)
    phi = 0.9
    s = StabilizerElement.boost(phi)
    m = metric_operator(s)
    assert np.allclose(m, expm(phi * SIGMA2), atol=1e-14)
    assert np.allclose(m, m.conj().T) and np.all(np.linalg.eigvalsh(m) > 0)
    with pytest.raises(SingularTransformError):
        metric_operator(np.array([[1, 2], [2, 4]]))


@pytest.mark.parametrize("phi", PHIS)
def test_pseudo_hermiticity(phi):
    s = StabilizerElement.boost(phi)
    fam = transformed_family(s, LatticeModel("honeycomb", 1.0, 0.4, 0.1))
    assert max(pseudo_hermiticity_residual(s, fam(pi)) for pi in sample_kinetic(seed=3)) < 1e-12


def test_pt_potential_definition():
    m = LatticeModel("chain", 1.0, 0.5, 0.2)
    assert np.allclose(pt_potential(SIGMA0, m, 0.3), 0)
    s = StabilizerElement.boost(1.0)
    k = np.pi / 4
    u = pt_potential(s, m, k)
    assert np.max(np.abs(bloch_at_k(m, k) + u - transform_bloch(s, m, k))) < 1e-13
    assert not np.allclose(u, u.conj().T)
    assert pt_residual(potential_family(s, m)) < 1e-12


@pytest.mark.parametrize("geo", ["chain", "honeycomb"])
def test_potential_first_order(geo):
    m = LatticeModel(geo, 1.0, 0.5, 0.1)
    k = 0.37 if geo == "chain" else np.array([0.4, -1.1])
    h = bloch_at_k(m, k)
    phi = 1e-4
    u = pt_potential(StabilizerElement.boost(phi), m, k)
    assert np.linalg.norm(u - first_order_potential(h, phi), 2) <= 1e-7 * np.linalg.norm(h, 2)
    # the commutator coefficient is phi/2, not phi
    full = phi * (h @ SIGMA2 - SIGMA2 @ h)
    assert np.linalg.norm(u - full, 2) > 1e-5 * np.linalg.norm(h, 2)


def test_site_metric_blocks():
    s = StabilizerElement.boost(0.4)
    big = site_metric(s, 3)
    assert big.shape == (6, 6)
    assert np.allclose(big[2:4, 2:4], metric_operator(s)) and np.allclose(big[0:2, 2:4], 0)


def test_finite_pseudo_hermiticity():
    tm = boosted_couplings(LatticeModel("honeycomb", 1.0, 0.3), 1.2)
    h = assemble(tm.couplings, (3, 3)).matrix
    m = site_metric(tm.element, 9)
    assert np.max(np.abs(m @ h - h.conj().T @ m)) < 1e-12


def test_expm_agrees_with_taylor_oracle():
    tm = boosted_couplings(LatticeModel("chain", 1.0, 0.5), 1.5)
    h = assemble(tm.couplings, 8).matrix  # n = 16
    for t in (0.1, 1.0, 10.0):
        assert np.allclose(expm(-1j * t * h), taylor_expm(-1j * t * h), atol=1e-10)


def test_metric_drift_small_on_oracle_evolution():
    tm = boosted_couplings(LatticeModel("chain", 1.0, 0.5), 1.5)
    h = assemble(tm.couplings, 8).matrix
    m = site_metric(tm.element, 8)
    rng = np.random.default_rng(0)
    psi = rng.normal(size=16) + 1j * rng.normal(size=16)
    ref = np.real(psi.conj() @ m @ psi)
    for t in (0.1, 1.0, 10.0):
        phi_t = taylor_expm(-1j * t * h) @ psi
        assert abs(np.real(phi_t.conj() @ m @ phi_t) - ref) / ref < 1e-8
    assert metric_drift(h, m, [psi], (0.1, 1.0, 10.0)) < 1e-8
    # the plain norm is not conserved, which is why the metric is needed
    plain = expm(-10j * h) @ psi
    assert abs(np.vdot(plain, plain).real - np.vdot(psi, psi).real) > 1e-3


def test_spectral_reality_report_fields():
    report = spectral_reality_report(boosted_couplings(LatticeModel("chain", 1.0, 0.5), 1.5), 40)
    assert list(report) == ["phi", "max_im_lambda", "pt_residual",
                            "pseudo_hermiticity_residual", "metric_drift"]
    assert report["max_im_lambda"] < 1e-8
    assert report["pt_residual"] < 1e-12
    assert report["pseudo_hermiticity_residual"] < 1e-12
    assert report["metric_drift"] < 1e-8


def test_spectral_reality_hermitian_path_exact():
    report = spectral_reality_report(rotated_couplings(LatticeModel("chain", 1.0, 0.5), 0.0), 10)
    assert report["max_im_lambda"] == 0.0


@settings(max_examples=40, deadline=None)
@given(st.floats(-2, 2), st.floats(-3, 3), st.floats(-3, 3), st.floats(-1, 1))
def test_pt_property(phi, p1, p2, mu):
    m = LatticeModel("honeycomb", 1.0, mu)
    s = StabilizerElement.boost(phi)
    fam = transformed_family(s, m)
    pi = KineticVector(p1, p2)
    pt = SIGMA3 @ np.conj(fam(KineticVector(-p1, p2))) @ SIGMA3
    assert np.linalg.norm(pt - fam(pi), 2) < 1e-12 * np.cosh(phi) ** 2 * 10
