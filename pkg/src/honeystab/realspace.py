"""Finite real-space Hamiltonians built from coupling tables.

Sites are numbered cell-major: ``2 n1 + s`` on the chain and
``2 (n1 N2 + n2) + s`` on the honeycomb, with ``s = 0`` for A and ``1`` for B.
A hop ``(frm, to, offset, t)`` puts ``t`` at row ``(R + offset, to)``,
column ``(R, frm)``.
"""
from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass

import numpy as np

from .eigen import QR_MAX_DIM, charpoly_newton_step, jacobi_eigh, qr_eigvals
from .lattice import CouplingTable, LatticeModel, base_couplings, dispersion, reciprocal_vectors
from .stabilizer import TransformedModel

BOUNDARIES = ("periodic", "open")
HERMITIAN_TOL = 1e-12
JACOBI_RESIDUAL_TOL = 1e-9
CHARPOLY_RESIDUAL_TOL = 1e-6


class NonHermitianError(ValueError):
    pass


def normalize_extent(geometry: str, extent) -> tuple[int, ...]:
    dims = (extent,) if np.isscalar(extent) else tuple(extent)
    want = 1 if geometry == "chain" else 2
    if len(dims) != want:
        raise ValueError(f"{geometry} extent needs {want} cell count(s), got {extent!r}")
    dims = tuple(int(d) for d in dims)
    if any(d < 1 for d in dims):
        raise ValueError(f"cell counts must be positive, got {dims}")
    return dims


@dataclass(frozen=True)
class RealHamiltonian:
    matrix: np.ndarray
    geometry: str
    extent: tuple[int, ...]
    boundary: str
    dropped: int = 0

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_cells(self) -> int:
        return int(np.prod(self.extent))

    def site_index(self, cell, sublattice: str) -> int:
        s = "AB".index(sublattice)
        if self.geometry == "chain":
            return 2 * int(cell[0]) + s
        return 2 * (int(cell[0]) * self.extent[1] + int(cell[1])) + s

    def site_label(self, index: int) -> tuple[tuple[int, ...], str]:
        c, s = divmod(int(index), 2)
        if self.geometry == "chain":
            return (c,), "AB"[s]
        return divmod(c, self.extent[1]), "AB"[s]


def assemble(table: CouplingTable, extent, boundary: str = "periodic") -> RealHamiltonian:
    """Site-basis matrix of ``table`` on a finite patch of cells.

    Under periodic boundaries offsets wrap modulo the extent (at least 2
    cells per direction).  Under open boundaries hops leaving the patch are
    dropped; ``RealHamiltonian.dropped`` counts them.
    """
    if boundary not in BOUNDARIES:
        raise ValueError(f"boundary must be one of {BOUNDARIES}, got {boundary!r}")
    dims = normalize_extent(table.geometry, extent)
    if boundary == "periodic" and any(d < 2 for d in dims):
        raise ValueError("periodic boundaries need at least 2 cells per direction")
    chain = table.geometry == "chain"
    cells = np.array(list(itertools.product(*(range(d) for d in dims))), dtype=int)
    n_cells = len(cells)
    dims_arr = np.array(dims)

    def index(c, s):
        flat = c[:, 0] if chain else c[:, 0] * dims[1] + c[:, 1]
        return 2 * flat + s

    h = np.zeros((2 * n_cells, 2 * n_cells), dtype=complex)
    base = np.arange(n_cells)
    h[2 * base, 2 * base] += table.onsite_a
    h[2 * base + 1, 2 * base + 1] += table.onsite_b
    dropped = 0
    for hop in table.hops:
        shift = np.array(hop.offset[:1] if chain else hop.offset)
        target = cells + shift
        cols = index(cells, "AB".index(hop.frm))
        if boundary == "periodic":
            rows = index(target % dims_arr, "AB".index(hop.to))
        else:
            inside = np.all((target >= 0) & (target < dims_arr), axis=1)
            dropped += int(np.count_nonzero(~inside))
            rows = index(target[inside], "AB".index(hop.to))
            cols = cols[inside]
        np.add.at(h, (rows, cols), hop.amplitude)
    return RealHamiltonian(h, table.geometry, dims, boundary, dropped)


def _matrix(h) -> np.ndarray:
    return h.matrix if isinstance(h, RealHamiltonian) else np.asarray(h, dtype=complex)


def hermitian_eigenvalues(h) -> np.ndarray:
    """Ascending spectrum of a Hermitian matrix by cyclic Jacobi.

    Every eigenpair is checked against ``||Hv - lambda v|| <= 1e-9 ||H||``.
    """
    a = _matrix(h)
    scale = max(float(np.linalg.norm(a)), 1.0)
    if np.max(np.abs(a - a.conj().T), initial=0.0) > HERMITIAN_TOL * scale:
        raise NonHermitianError("matrix is not Hermitian; use general_eigenvalues")
    w, v = jacobi_eigh(0.5 * (a + a.conj().T))
    if a.size:
        residual = np.linalg.norm(a @ v - v * w, axis=0).max()
        if residual > JACOBI_RESIDUAL_TOL * np.linalg.norm(a, 2):
            raise ArithmeticError(f"Jacobi residual {residual:.3e} exceeds tolerance")
    return w


def general_eigenvalues(h) -> np.ndarray:
    """Complex spectrum by Hessenberg reduction and shifted QR, sorted by (Re, Im).

    Each eigenvalue is accepted only if the Newton correction
    ``|p(lambda) / p'(lambda)|`` of the characteristic polynomial is at most
    ``1e-6 ||H||``.
    """
    a = _matrix(h)
    n = a.shape[0]
    if n > QR_MAX_DIM:
        raise ValueError(f"general_eigenvalues is limited to n <= {QR_MAX_DIM}, got {n}")
    eig = qr_eigvals(a)
    scale = max(float(np.linalg.norm(a)), np.finfo(float).tiny)
    worst = max((charpoly_newton_step(a, lam) for lam in eig), default=0.0)
    if worst > CHARPOLY_RESIDUAL_TOL * scale:
        raise ArithmeticError(f"characteristic-polynomial check failed ({worst:.3e})")
    return sort_spectrum(eig)


def sort_spectrum(values) -> np.ndarray:
    values = np.asarray(values)
    order = np.lexsort((np.imag(values), np.real(values)))
    return values[order]


def multiset_distance(a, b, scale: float = 1.0) -> float:
    """max |a_i - b_i| / scale after sorting both by (Re, Im)."""
    a, b = sort_spectrum(np.asarray(a, dtype=complex)), sort_spectrum(np.asarray(b, dtype=complex))
    if a.shape != b.shape:
        raise ValueError(f"multisets differ in size: {a.size} vs {b.size}")
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a - b)) / scale)


def allowed_momenta(geometry: str, extent) -> np.ndarray:
    """Crystal momenta compatible with periodic wrapping of ``extent`` cells."""
    dims = normalize_extent(geometry, extent)
    if geometry == "chain":
        return np.pi * np.arange(dims[0]) / dims[0]
    g1, g2 = reciprocal_vectors()
    j1, j2 = np.meshgrid(np.arange(dims[0]), np.arange(dims[1]), indexing="ij")
    return (j1.reshape(-1, 1) / dims[0]) * g1 + (j2.reshape(-1, 1) / dims[1]) * g2


def bloch_spectrum_multiset(model, extent) -> np.ndarray:
    """Sorted ``{E+(k_j), E-(k_j)}`` over the allowed momenta of a periodic patch."""
    base = model.base if isinstance(model, TransformedModel) else model
    ks = allowed_momenta(base.geometry, extent)
    e_plus, e_minus = dispersion(base, ks)
    return np.sort(np.concatenate([np.atleast_1d(e_plus), np.atleast_1d(e_minus)]))


def band_edges(model: LatticeModel) -> tuple[float, float]:
    top = float(np.hypot(model.max_kinetic, model.mu))
    return model.e0 - top, model.e0 + top


def table_of(model) -> CouplingTable:
    if isinstance(model, TransformedModel):
        return model.couplings
    if isinstance(model, LatticeModel):
        return base_couplings(model)
    return model


def finite_spectrum(model, extent, boundary: str = "periodic") -> np.ndarray:
    """Spectrum of the assembled patch; Jacobi for Hermitian tables, QR otherwise."""
    table = table_of(model)
    ham = assemble(table, extent, boundary)
    if table.hermitian:
        return hermitian_eigenvalues(ham).astype(complex)
    return general_eigenvalues(ham)


def write_spectrum_csv(path, values) -> None:
    values = sort_spectrum(np.asarray(values, dtype=complex))
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["index", "re_eV", "im_eV"])
        for i, v in enumerate(values):
            writer.writerow([i, format(float(v.real), ".17g"), format(float(v.imag), ".17g")])


def read_spectrum_csv(path) -> np.ndarray:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["index", "re_eV", "im_eV"]:
        raise ValueError(f"{path}: expected header index,re_eV,im_eV")
    return np.array([complex(float(r[1]), float(r[2])) for r in rows[1:]])
