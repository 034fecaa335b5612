"""Parity, time reversal and the metric of boosted (PT-symmetric) models.

Families are maps ``Pi -> 2x2 matrix`` with ``Pi = (Pi1, Pi2)``.  Parity is
conjugation by s3 together with ``Pi -> -Pi``.  Time reversal is entrywise
complex conjugation; because the Pi2 operator is odd under conjugation it
also sends ``Pi2 -> -Pi2``.  The combined action is therefore

    (PT H)(Pi1, Pi2) = s3 conj(H(-Pi1, Pi2)) s3.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import expm

from .algebra import SIGMA2, SIGMA3, StabilizerElement, _matrix, conjugate, inverse
from .lattice import KineticVector, LatticeModel, bloch_at_k, bloch_hamiltonian
from .realspace import assemble, finite_spectrum
from .stabilizer import TransformedModel

Family = Callable[[KineticVector], np.ndarray]

PT_SAMPLES = 100
PT_SAMPLE_RADIUS = 3.0
DRIFT_TIMES = (0.1, 1.0, 10.0)


def _norm(m) -> float:
    return float(np.linalg.norm(m, 2))


@dataclass(frozen=True)
class PTContext:
    """The discrete operations on a Pi-parameterized family."""

    def parity(self, hfun: Family) -> Family:
        return lambda pi: SIGMA3 @ hfun(KineticVector(-pi[0], -pi[1])) @ SIGMA3

    def time_reversal(self, hfun: Family) -> Family:
        return lambda pi: np.conj(hfun(KineticVector(pi[0], -pi[1])))

    def pt(self, hfun: Family) -> Family:
        return self.parity(self.time_reversal(hfun))


def sample_kinetic(n: int = PT_SAMPLES, seed: int = 0, radius: float = PT_SAMPLE_RADIUS):
    rng = np.random.default_rng(seed)
    return [KineticVector(*p) for p in rng.uniform(-radius, radius, size=(n, 2))]


def pt_residual(hfun: Family, samples=None) -> float:
    """max over samples of ``||(PT H)(Pi) - H(Pi)||`` (spectral norm)."""
    samples = sample_kinetic() if samples is None else samples
    pt = PTContext().pt(hfun)
    return max(_norm(pt(pi) - hfun(pi)) for pi in samples)


def base_family(model: LatticeModel) -> Family:
    return lambda pi: bloch_hamiltonian(model, KineticVector(*pi))


def transformed_family(s, model: LatticeModel) -> Family:
    return lambda pi: conjugate(s, bloch_hamiltonian(model, KineticVector(*pi)))


def pt_odd_perturbation(norm: float, seed: int = 0) -> np.ndarray:
    """Constant 2x2 X with ``PT X = -X`` and ``||X|| = norm``; adding it breaks PT by ``2 norm``."""
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    odd = 0.5 * (x - SIGMA3 @ np.conj(x) @ SIGMA3)
    return odd * (norm / _norm(odd))


def metric_operator(s) -> np.ndarray:
    """M = S^dagger S (positive definite; the identity for unitary S)."""
    inverse(s)  # rejects singular S
    m = _matrix(s)
    return m.conj().T @ m


def pseudo_hermiticity_residual(s, h_tilde) -> float:
    """``||M H~ - H~^dagger M||`` for ``M = S^dagger S``."""
    m = metric_operator(s)
    return _norm(m @ h_tilde - h_tilde.conj().T @ m)


def potential_from_matrix(s, h) -> np.ndarray:
    """U = S^-1 [H, S] = S^-1 H S - H."""
    return conjugate(s, h) - h


def pt_potential(s, model: LatticeModel, k) -> np.ndarray:
    return potential_from_matrix(s, bloch_at_k(model, k))


def potential_family(s, model: LatticeModel) -> Family:
    return lambda pi: potential_from_matrix(s, bloch_hamiltonian(model, KineticVector(*pi)))


def first_order_potential(h, phi: float) -> np.ndarray:
    """Leading term of U for the boost ``exp(phi s2 / 2)``: ``(phi / 2) [H, s2]``."""
    return 0.5 * phi * (h @ SIGMA2 - SIGMA2 @ h)


def site_metric(s, n_cells: int) -> np.ndarray:
    """Block-diagonal metric, one copy of ``S^dagger S`` per cell."""
    return np.kron(np.eye(n_cells), metric_operator(s))


def _eigenvector(h: np.ndarray, lam: complex, seed: int = 0) -> np.ndarray:
    # inverse iteration at a slightly shifted eigenvalue
    rng = np.random.default_rng(seed)
    v = rng.normal(size=h.shape[0]) + 1j * rng.normal(size=h.shape[0])
    shift = lam + 1e-9 * max(1.0, abs(lam))
    op = h - shift * np.eye(h.shape[0])
    for _ in range(3):
        v = np.linalg.solve(op, v)
        v /= np.linalg.norm(v)
    return v


def metric_drift(h: np.ndarray, metric: np.ndarray, states, times) -> float:
    """max relative change of ``psi^dagger M psi`` under ``exp(-i H t)``."""
    worst = 0.0
    for psi in states:
        ref = float(np.real(psi.conj() @ metric @ psi))
        for t in times:
            phi_t = expm(-1j * t * h) @ psi
            now = float(np.real(phi_t.conj() @ metric @ phi_t))
            worst = max(worst, abs(now - ref) / abs(ref))
    return worst


def spectral_reality_report(tm: TransformedModel, extent, seed: int = 0) -> dict:
    """Imaginary parts of the finite periodic spectrum and metric-norm conservation."""
    ham = assemble(tm.couplings, extent, "periodic")
    spectrum = finite_spectrum(tm, extent, "periodic")
    max_im = float(np.max(np.abs(spectrum.imag))) if spectrum.size else 0.0
    s = tm.element
    metric = site_metric(s, ham.n_cells)
    rng = np.random.default_rng(seed)
    lam = spectrum[rng.integers(spectrum.size)]
    states = [_eigenvector(ham.matrix, lam, seed),
              rng.normal(size=ham.n) + 1j * rng.normal(size=ham.n)]
    times = tuple(t / tm.base.delta for t in DRIFT_TIMES)
    samples = sample_kinetic(seed=seed)
    family = transformed_family(s, tm.base)
    pseudo = max(pseudo_hermiticity_residual(s, family(pi)) for pi in samples)
    finite_pseudo = _norm(metric @ ham.matrix - ham.matrix.conj().T @ metric)
    return {
        "phi": tm.parameter if tm.kind == "boost" else 0.0,
        "max_im_lambda": max_im,
        "pt_residual": pt_residual(family, samples),
        "pseudo_hermiticity_residual": max(pseudo, finite_pseudo),
        "metric_drift": metric_drift(ham.matrix, metric, states, times),
    }


def boost_element(phi: float) -> StabilizerElement:
    return StabilizerElement.boost(phi, axis=2)
