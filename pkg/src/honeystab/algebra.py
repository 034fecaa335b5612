"""2x2 complex matrix algebra: Pauli and Dirac sets, SL(2,C) elements.

Every 2x2 quantity (Pauli matrices, gamma matrices, stabilizer elements,
Bloch Hamiltonians) is a plain ``numpy`` array of shape ``(2, 2)`` and dtype
``complex128``.  Elements act by similarity, ``M -> S^-1 M S``.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass, field

import numpy as np

EPS_ALG = 1e-12

SIGMA0 = np.array([[1, 0], [0, 1]], dtype=complex)
SIGMA1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA3 = np.array([[1, 0], [0, -1]], dtype=complex)
_SIGMAS = (SIGMA1, SIGMA2, SIGMA3)

METRIC = np.diag([1.0, -1.0, -1.0])


class SingularTransformError(ValueError):
    """Raised when a similarity transform is requested with a singular S."""


def pauli(i: int) -> np.ndarray:
    """Return the Pauli matrix sigma_i for ``i`` in 1..3 (a fresh copy)."""
    if i not in (1, 2, 3):
        raise ValueError(f"Pauli index must be 1, 2 or 3, got {i!r}")
    return _SIGMAS[i - 1].copy()


def as_c2(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    return m


def anticommutator(a, b) -> np.ndarray:
    return a @ b + b @ a


def close(a, b, tol: float = EPS_ALG) -> bool:
    """Entrywise equality within ``tol``."""
    return bool(np.max(np.abs(np.asarray(a) - np.asarray(b))) <= tol)


def sigma_coefficients(m) -> np.ndarray:
    """Coefficients (c0, c1, c2, c3) with ``m = c0 + c1 s1 + c2 s2 + c3 s3``."""
    m = as_c2(m)
    return np.array([0.5 * np.trace(m)] + [0.5 * np.trace(s @ m) for s in _SIGMAS])


def from_sigma_coefficients(c) -> np.ndarray:
    c = np.asarray(c, dtype=complex)
    if c.shape == (3,):
        c = np.concatenate([[0.0], c])
    return c[0] * SIGMA0 + c[1] * SIGMA1 + c[2] * SIGMA2 + c[3] * SIGMA3


@dataclass(frozen=True)
class GammaSet:
    """Dirac matrices of 2+1 dimensions built from the quasi-spin Paulis."""

    gamma0: np.ndarray
    gamma1: np.ndarray
    gamma2: np.ndarray
    metric: np.ndarray = field(default_factory=METRIC.copy)

    @property
    def matrices(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return (self.gamma0, self.gamma1, self.gamma2)

    def clifford_residual(self) -> float:
        """max |{g_mu, g_nu} - 2 eta_{mu nu}| over all index pairs and entries."""
        return clifford_residual(self.matrices, self.metric)


def clifford_residual(gammas, metric=METRIC) -> float:
    worst = 0.0
    for mu, gm in enumerate(gammas):
        for nu, gn in enumerate(gammas):
            diff = anticommutator(gm, gn) - 2.0 * metric[mu, nu] * SIGMA0
            worst = max(worst, float(np.max(np.abs(diff))))
    return worst


def gamma_set() -> GammaSet:
    """gamma0 = s3, gamma1 = s3 s1, gamma2 = s3 s2."""
    return GammaSet(SIGMA3.copy(), SIGMA3 @ SIGMA1, SIGMA3 @ SIGMA2)


def _cos_sinc(z2: complex, root: complex | None = None) -> tuple[complex, complex]:
    """cos(z) and sin(z)/z for z = sqrt(z2).

    Both are even in z.  Small ``|z2|`` (including the nilpotent case z2 = 0)
    goes through the power series in z2 so no branch is ever chosen.
    ``root`` forces the closed form with that particular square root.
    """
    if root is None and abs(z2) < 0.25:
        cos_z = 0.0 + 0.0j
        sinc_z = 0.0 + 0.0j
        term_c = 1.0 + 0.0j
        term_s = 1.0 + 0.0j
        for n in range(14):
            cos_z += term_c
            sinc_z += term_s
            term_c *= -z2 / ((2 * n + 1) * (2 * n + 2))
            term_s *= -z2 / ((2 * n + 2) * (2 * n + 3))
        return cos_z, sinc_z
    z = cmath.sqrt(z2) if root is None else complex(root)
    return cmath.cos(z), cmath.sin(z) / z


def _exp_minus_i(a, root: complex | None = None) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    z2 = complex(a @ a)
    cos_z, sinc_z = _cos_sinc(z2, root)
    a_sigma = a[0] * SIGMA1 + a[1] * SIGMA2 + a[2] * SIGMA3
    return cos_z * SIGMA0 - 1j * sinc_z * a_sigma


@dataclass(frozen=True)
class StabilizerElement:
    """An SL(2,C) matrix together with the parameters that generated it.

    ``kind`` is ``"rotation"`` (real ``angle`` about ``axis``), ``"boost"``
    (real ``rapidity`` along Pauli ``axis``) or ``"general"``.  In every
    case ``matrix == exp(-i generator . sigma)``.
    """

    matrix: np.ndarray
    kind: str
    generator: np.ndarray
    axis: tuple[float, float, float] | int | None = None
    angle: float | None = None
    rapidity: float | None = None

    def __post_init__(self):
        m = as_c2(self.matrix)
        det = complex(np.linalg.det(m))
        if abs(det - 1.0) > EPS_ALG:
            raise ValueError(f"stabilizer element must have det 1, got {det}")
        if self.kind == "rotation" and not close(m.conj().T @ m, SIGMA0):
            raise ValueError("rotation element is not unitary")
        if self.kind not in ("rotation", "boost", "general"):
            raise ValueError(f"unknown kind {self.kind!r}")

    @property
    def inverse(self) -> np.ndarray:
        return inverse(self.matrix)

    @classmethod
    def rotation(cls, angle: float, axis=2) -> "StabilizerElement":
        """exp(-i angle n.sigma / 2); ``axis`` is a Pauli index or a 3-vector."""
        n = _axis_vector(axis)
        a = n * (angle / 2.0)
        return cls(_exp_minus_i(a), "rotation", a.astype(complex),
                   axis=axis if isinstance(axis, int) else tuple(n), angle=float(angle))

    @classmethod
    def boost(cls, rapidity: float, axis: int = 2) -> "StabilizerElement":
        """exp(rapidity sigma_axis / 2), i.e. generator a = i rapidity/2 e_axis.

        For ``axis=2`` this maps s3 -> cosh s3 - i sinh s1 and boosts the
        (gamma0, gamma2) plane by ``rapidity``.
        """
        if axis not in (1, 2):
            raise ValueError("boosts are generated by sigma_1 or sigma_2")
        a = np.zeros(3, dtype=complex)
        a[axis - 1] = 0.5j * rapidity
        return cls(_exp_minus_i(a), "boost", a, axis=axis, rapidity=float(rapidity))


def _axis_vector(axis) -> np.ndarray:
    if isinstance(axis, (int, np.integer)):
        if axis not in (1, 2, 3):
            raise ValueError(f"axis index must be 1, 2 or 3, got {axis!r}")
        n = np.zeros(3)
        n[axis - 1] = 1.0
        return n
    n = np.asarray(axis, dtype=float)
    norm = np.linalg.norm(n)
    if n.shape != (3,) or norm == 0:
        raise ValueError("axis must be a non-zero 3-vector")
    return n / norm


def exp_generator(a) -> StabilizerElement:
    """S = exp(-i a.sigma) for complex ``a``, via cos(z) - i sinc(z) a.sigma, z^2 = a.a."""
    a = np.asarray(a, dtype=complex)
    if a.shape != (3,) or not np.all(np.isfinite(a)):
        raise ValueError("generator must be a finite complex 3-vector")
    return StabilizerElement(_exp_minus_i(a), "general", a.copy())


def _matrix(s) -> np.ndarray:
    return s.matrix if isinstance(s, StabilizerElement) else as_c2(s)


def inverse(s) -> np.ndarray:
    m = _matrix(s)
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    if abs(det) < EPS_ALG:
        raise SingularTransformError(f"transform is singular (det = {det})")
    return np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]]) / det


def conjugate(s, m) -> np.ndarray:
    """S^-1 M S."""
    return inverse(s) @ as_c2(m) @ _matrix(s)


def sigma_action(s) -> np.ndarray:
    """3x3 complex R with S^-1 sigma_i S = sum_j R[i, j] sigma_j.

    Composition: ``sigma_action(S1 @ S2) == sigma_action(S1) @ sigma_action(S2)``.
    """
    s_inv, m = inverse(s), _matrix(s)
    r = np.empty((3, 3), dtype=complex)
    for i, si in enumerate(_SIGMAS):
        rotated = s_inv @ si @ m
        for j, sj in enumerate(_SIGMAS):
            r[i, j] = 0.5 * np.trace(sj @ rotated)
    return r


def lorentz_action(s) -> np.ndarray:
    """3x3 complex Lambda with S^-1 gamma_mu S = sum_nu Lambda[mu, nu] gamma_nu.

    Uses tr(gamma_rho gamma_nu) = 2 eta_{rho nu}, so
    Lambda[mu, nu] = eta_{nu nu} tr(gamma_nu S^-1 gamma_mu S) / 2.
    """
    gammas = gamma_set().matrices
    s_inv, m = inverse(s), _matrix(s)
    lam = np.empty((3, 3), dtype=complex)
    for mu, gm in enumerate(gammas):
        rotated = s_inv @ gm @ m
        for nu, gn in enumerate(gammas):
            lam[mu, nu] = 0.5 * METRIC[nu, nu] * np.trace(gn @ rotated)
    return lam
