"""Dimer chain and honeycomb models, their Bloch form and coupling tables.

Conventions
-----------
Cells are labelled by integer pairs ``(n1, n2)``; the cell position is
``X = n1 a1 + n2 a2`` (honeycomb) or ``X = 2 n1`` (chain, unit site spacing,
two sites per cell).  Sublattice A sits at ``X`` and B at ``X + b1``
(honeycomb) or ``X + 1`` (chain).

A hop ``(frm, to, offset, t)`` stands for ``t |to, R + offset><frm, R|``
summed over all cells ``R``.  The Bloch matrix is assembled in the cell
gauge,

    H[to, frm](k) = sum_hops t exp(i k . X(offset)),

so the A-row off-diagonal entry of the nearest-neighbour model is
``Delta * g(k)`` with

    g(k) = sum_i exp(i k . (b1 - b_i)) = exp(i k.b1) * conj(sum_i exp(i k.b_i))

for the honeycomb and ``g(k) = 1 + exp(2ik)`` for the chain.  ``|g|`` is the
usual structure factor modulus, so the dispersion is unaffected, and the
kinetic components ``Pi1 = Delta Re g``, ``Pi2 = -Delta Im g`` contain only
lattice-vector Fourier components.  That last property is what makes a
k-independent similarity transform produce a genuine lattice model.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

import numpy as np

from .algebra import SIGMA0, SIGMA1, SIGMA2, SIGMA3

GEOMETRIES = ("chain", "honeycomb")
SUBLATTICES = ("A", "B")

SQRT3 = np.sqrt(3.0)
B1 = np.array([0.0, 1.0])
B2 = np.array([-SQRT3 / 2.0, -0.5])
B3 = -B1 - B2
BONDS = (B1, B2, B3)
A1 = B3 - B2
A2 = B1 - B3

# Cell offsets delta with g(k) = sum exp(i k . X(delta)); the A <- B hops.
KINETIC_OFFSETS = {
    "chain": ((0, 0), (1, 0)),
    "honeycomb": ((0, 0), (1, 1), (0, 1)),
}

DIRAC_TOL = 1e-12


def reciprocal_vectors() -> tuple[np.ndarray, np.ndarray]:
    """G1, G2 with G_i . a_j = 2 pi delta_ij for the honeycomb cell."""
    lattice = np.array([A1, A2])
    recip = 2.0 * np.pi * np.linalg.inv(lattice).T
    return recip[0], recip[1]


def cell_position(geometry: str, offset) -> np.ndarray:
    n1, n2 = offset
    if geometry == "chain":
        return np.array([2.0 * n1])
    return n1 * A1 + n2 * A2


def site_position(geometry: str, cell, sublattice: str) -> np.ndarray:
    x = cell_position(geometry, cell)
    if sublattice == "A":
        return x
    return x + (np.array([1.0]) if geometry == "chain" else B1)


@dataclass(frozen=True)
class LatticeModel:
    """Nearest-neighbour Dirac lattice: H = Delta alpha.pi + mu beta + E0 (energies in eV)."""

    geometry: str
    delta: float
    mu: float = 0.0
    e0: float = 0.0

    def __post_init__(self):
        if self.geometry not in GEOMETRIES:
            raise ValueError(f"geometry must be one of {GEOMETRIES}, got {self.geometry!r}")
        if not self.delta > 0:
            raise ValueError(f"hopping amplitude must be positive, got {self.delta!r}")
        for name in ("delta", "mu", "e0"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    @property
    def dim(self) -> int:
        return 1 if self.geometry == "chain" else 2

    @property
    def max_kinetic(self) -> float:
        """max_k |Pi(k)|: 2 Delta (chain), 3 Delta (honeycomb)."""
        return (2.0 if self.geometry == "chain" else 3.0) * self.delta


class KineticVector(NamedTuple):
    pi1: float
    pi2: float

    @property
    def norm2(self) -> float:
        return self.pi1 ** 2 + self.pi2 ** 2

    def __neg__(self):
        return KineticVector(-self.pi1, -self.pi2)


def _as_k(geometry: str, k) -> np.ndarray:
    k = np.asarray(k, dtype=float)
    if geometry == "chain":
        return k[..., 0] if k.ndim and k.shape[-1:] == (1,) else k
    if k.shape[-1:] != (2,):
        raise ValueError(f"honeycomb Bloch vectors need 2 components, got shape {k.shape}")
    return k


def structure_factor(geometry: str, k) -> np.ndarray | complex:
    """g(k) in the cell gauge (see module docstring); vectorized over k."""
    k = _as_k(geometry, k)
    if geometry == "chain":
        return 1.0 + np.exp(2j * k)
    total = 0.0
    for offset in KINETIC_OFFSETS["honeycomb"]:
        total = total + np.exp(1j * (k @ cell_position("honeycomb", offset)))
    return total


def bond_sum(k) -> np.ndarray | complex:
    """sum_i exp(i k . b_i) over the three honeycomb bonds."""
    k = np.asarray(k, dtype=float)
    return sum(np.exp(1j * (k @ b)) for b in BONDS)


def kinetic_of_k(model: LatticeModel, k) -> KineticVector:
    """Pi1 - i Pi2 = Delta g(k); for the chain Pi = Delta (1 + cos 2k, -sin 2k)."""
    g = model.delta * structure_factor(model.geometry, k)
    return KineticVector(np.real(g), -np.imag(g))


def bloch_hamiltonian(model: LatticeModel, pi: KineticVector) -> np.ndarray:
    """H(Pi) = Pi1 s1 + Pi2 s2 + mu s3 + E0."""
    pi1, pi2 = pi
    return pi1 * SIGMA1 + pi2 * SIGMA2 + model.mu * SIGMA3 + model.e0 * SIGMA0


def bloch_at_k(model: LatticeModel, k) -> np.ndarray:
    return bloch_hamiltonian(model, kinetic_of_k(model, k))


def dispersion(model: LatticeModel, k):
    """(E+, E-) = E0 +/- sqrt(Pi1^2 + Pi2^2 + mu^2); vectorized over k."""
    pi = kinetic_of_k(model, k)
    width = np.sqrt(pi.pi1 ** 2 + pi.pi2 ** 2 + model.mu ** 2)
    return model.e0 + width, model.e0 - width


def dirac_points(model: LatticeModel) -> list:
    """Bloch vectors where Pi vanishes: pi/2 for the chain, K and K' for the honeycomb."""
    if model.geometry == "chain":
        points = [np.pi / 2.0]
    else:
        points = [np.array([4.0 * np.pi / (3.0 * SQRT3), 0.0]),
                  np.array([2.0 * np.pi / (3.0 * SQRT3), 2.0 * np.pi / 3.0])]
    for k in points:
        if abs(structure_factor(model.geometry, k)) >= DIRAC_TOL:
            raise ArithmeticError(f"structure factor does not vanish at {k}")
    return points


def mass_shell_residual(model: LatticeModel, k, hamiltonian: np.ndarray | None = None) -> float:
    """max over both bands of |(E - E0)^2 - Pi1^2 - Pi2^2 - mu^2|.

    Energies are numerical eigenvalues of ``hamiltonian`` (default: the
    Bloch matrix of ``model`` at ``k``), so a transformed Bloch matrix can be
    checked against the invariant of the untransformed model.
    """
    pi = kinetic_of_k(model, k)
    h = bloch_hamiltonian(model, pi) if hamiltonian is None else hamiltonian
    energies = np.linalg.eigvals(h)
    shell = (energies - model.e0) ** 2 - pi.norm2 - model.mu ** 2
    return float(np.max(np.abs(shell)))


# --------------------------------------------------------------------------
# coupling tables


@dataclass(frozen=True)
class Hop:
    frm: str
    to: str
    offset: tuple[int, int]
    amplitude: complex

    @property
    def key(self) -> tuple[str, str, tuple[int, int]]:
        return (self.frm, self.to, self.offset)

    def reverse_key(self) -> tuple[str, str, tuple[int, int]]:
        return (self.to, self.frm, (-self.offset[0], -self.offset[1]))


def neighbour_order(geometry: str, hop: Hop) -> int:
    """1 for nearest A-B bonds, 2 for same-sublattice hops, 3 for longer A-B hops."""
    if hop.frm == hop.to:
        return 2
    d = site_position(geometry, hop.offset, hop.to) - site_position(geometry, (0, 0), hop.frm)
    return 1 if abs(np.linalg.norm(d) - 1.0) < 1e-9 else 3


def hop_distance(geometry: str, hop: Hop) -> float:
    d = site_position(geometry, hop.offset, hop.to) - site_position(geometry, (0, 0), hop.frm)
    return float(np.linalg.norm(d))


@dataclass(frozen=True)
class CouplingTable:
    """Real-space hopping list plus on-site energies of a two-sublattice model.

    Build through :meth:`from_hops`, which merges repeated (frm, to, offset)
    keys, drops exactly-zero amplitudes and fixes a deterministic order.
    """

    geometry: str
    hops: tuple[Hop, ...]
    onsite_a: complex
    onsite_b: complex
    meta: dict = field(default_factory=dict, compare=False)

    @classmethod
    def from_hops(cls, geometry: str, hops: Iterable[Hop], onsite_a, onsite_b,
                  meta: dict | None = None) -> "CouplingTable":
        if geometry not in GEOMETRIES:
            raise ValueError(f"unknown geometry {geometry!r}")
        merged: dict = {}
        for hop in hops:
            if hop.frm not in SUBLATTICES or hop.to not in SUBLATTICES:
                raise ValueError(f"bad sublattice in {hop}")
            offset = (int(hop.offset[0]), int(hop.offset[1]))
            if geometry == "chain" and offset[1] != 0:
                raise ValueError("chain offsets must have a zero second component")
            if hop.frm == hop.to and offset == (0, 0):
                raise ValueError("on-site terms belong in onsite_a / onsite_b")
            key = (hop.frm, hop.to, offset)
            merged[key] = merged.get(key, 0.0) + complex(hop.amplitude)
        ordered = []
        for (frm, to, offset), amp in merged.items():
            if amp == 0:
                continue
            hop = Hop(frm, to, offset, amp)
            ordered.append((neighbour_order(geometry, hop), frm, to, offset, hop))
        ordered.sort(key=lambda item: item[:4])
        return cls(geometry, tuple(item[-1] for item in ordered),
                   complex(onsite_a), complex(onsite_b), dict(meta or {}))

    def onsite(self, sublattice: str) -> complex:
        return self.onsite_a if sublattice == "A" else self.onsite_b

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        if abs(self.onsite_a.imag) > tol or abs(self.onsite_b.imag) > tol:
            return False
        lookup = {hop.key: hop.amplitude for hop in self.hops}
        for hop in self.hops:
            partner = lookup.get(hop.reverse_key())
            if partner is None or abs(partner - np.conj(hop.amplitude)) > tol:
                return False
        return True

    @property
    def hermitian(self) -> bool:
        return self.is_hermitian()

    def by_order(self, order: int) -> list[Hop]:
        return [hop for hop in self.hops if neighbour_order(self.geometry, hop) == order]

    def coupling_classes(self) -> dict[str, list[Hop]]:
        """Group hops by neighbour order and sublattice pair, e.g. ``"2:AA"``."""
        classes: dict[str, list[Hop]] = {}
        for hop in self.hops:
            pair = "".join(sorted(hop.frm + hop.to))
            classes.setdefault(f"{neighbour_order(self.geometry, hop)}:{pair}", []).append(hop)
        return classes

    def bloch(self, k) -> np.ndarray:
        """2x2 Bloch matrix H[to, frm](k) = sum t exp(i k . X(offset))."""
        k = _as_k(self.geometry, k)
        index = {"A": 0, "B": 1}
        h = np.diag([self.onsite_a, self.onsite_b]).astype(complex)
        for hop in self.hops:
            x = cell_position(self.geometry, hop.offset)
            phase = np.exp(1j * (k * x[0] if self.geometry == "chain" else k @ x))
            h[index[hop.to], index[hop.frm]] += hop.amplitude * phase
        return h

    def to_dict(self) -> dict:
        return {
            "schema_version": TABLE_SCHEMA_VERSION,
            "geometry": self.geometry,
            "hermitian": self.hermitian,
            "onsite": {
                "A": {"re": self.onsite_a.real, "im": self.onsite_a.imag},
                "B": {"re": self.onsite_b.real, "im": self.onsite_b.imag},
            },
            "hops": [
                {"from": hop.frm, "to": hop.to, "offset": list(hop.offset),
                 "order": neighbour_order(self.geometry, hop),
                 "re": hop.amplitude.real, "im": hop.amplitude.imag}
                for hop in self.hops
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CouplingTable":
        version = data.get("schema_version")
        if version != TABLE_SCHEMA_VERSION:
            raise ValueError(f"unsupported coupling-table schema version {version!r}")
        onsite = data["onsite"]
        hops = [Hop(h["from"], h["to"], tuple(h["offset"]), complex(h["re"], h["im"]))
                for h in data["hops"]]
        return cls.from_hops(data["geometry"], hops,
                             complex(onsite["A"]["re"], onsite["A"]["im"]),
                             complex(onsite["B"]["re"], onsite["B"]["im"]))


TABLE_SCHEMA_VERSION = 1


def base_couplings(model: LatticeModel) -> CouplingTable:
    """Nearest-neighbour hops of amplitude Delta; on-site E0 +/- mu."""
    hops = []
    for offset in KINETIC_OFFSETS[model.geometry]:
        hops.append(Hop("B", "A", offset, model.delta))
        hops.append(Hop("A", "B", (-offset[0], -offset[1]), model.delta))
    return CouplingTable.from_hops(model.geometry, hops, model.e0 + model.mu, model.e0 - model.mu)


# --------------------------------------------------------------------------
# band sampling


@dataclass(frozen=True)
class BandSample:
    k: np.ndarray
    e_plus: float
    e_minus: float
    label: str | None = None
    s: float | None = None


@dataclass(frozen=True)
class BandStructure:
    samples: tuple[BandSample, ...]

    @property
    def gap(self) -> float:
        return min(b.e_plus - b.e_minus for b in self.samples)

    @property
    def bandwidth(self) -> float:
        return max(b.e_plus for b in self.samples) - min(b.e_minus for b in self.samples)

    def upper(self) -> np.ndarray:
        return np.array([b.e_plus for b in self.samples])

    def lower(self) -> np.ndarray:
        return np.array([b.e_minus for b in self.samples])


def sample_bands(model: LatticeModel, ks, labels=None, s=None) -> BandStructure:
    labels = labels if labels is not None else [None] * len(ks)
    s = s if s is not None else [None] * len(ks)
    samples = []
    for k, label, si in zip(ks, labels, s):
        e_plus, e_minus = dispersion(model, k)
        samples.append(BandSample(np.atleast_1d(np.asarray(k, dtype=float)),
                                  float(e_plus), float(e_minus), label, si))
    return BandStructure(tuple(samples))
