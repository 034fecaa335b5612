"""Stabilizer transforms of lattice models.

A k-independent S commutes with the kinetic operators, so
``S^-1 H(k) S = Pi1(k) s1' + Pi2(k) s2' + mu s3' + E0`` with ``s_i' = S^-1 s_i S``.
Expanding Pi1 and Pi2 into their lattice Fourier components gives the
real-space coupling table of the transformed model directly: nearest
bonds (H1), same-sublattice hops (H2), longer A-B hops (H3) and on-site
energies (V).

:func:`printed_couplings` spells the same tables out term by term in the
closed forms quoted for the chain and the honeycomb; the two routes are
compared in the test suite.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .algebra import SIGMA0, SIGMA1, SIGMA2, SIGMA3, StabilizerElement, conjugate
from .lattice import (KINETIC_OFFSETS, CouplingTable, Hop, LatticeModel, base_couplings,
                      bloch_at_k, kinetic_of_k, neighbour_order)

FW_DEGENERATE_TOL = 1e-14


class FWAngles(NamedTuple):
    theta: float
    phi: float


@dataclass(frozen=True)
class TransformedModel:
    base: LatticeModel
    element: StabilizerElement
    couplings: CouplingTable
    kind: str
    parameter: float

    def bloch(self, k) -> np.ndarray:
        return self.couplings.bloch(k)

    def header(self) -> dict:
        return {"geometry": self.base.geometry, "delta": self.base.delta,
                "mu": self.base.mu, "e0": self.base.e0,
                "kind": self.kind, "parameter": self.parameter}

    def to_dict(self) -> dict:
        data = {"header": self.header()}
        data.update(self.couplings.to_dict())
        return data


def transform_bloch(s, model: LatticeModel, k) -> np.ndarray:
    """S^-1 H(k) S."""
    return conjugate(s, bloch_at_k(model, k))


def fw_angles(model: LatticeModel, k) -> FWAngles:
    """cos theta = mu / eps, (cos phi, sin phi) ~ (Pi1, Pi2); degenerate points map to 0."""
    pi1, pi2 = kinetic_of_k(model, k)
    rho = np.hypot(pi1, pi2)
    eps = np.hypot(rho, model.mu)
    theta = 0.0 if eps < FW_DEGENERATE_TOL else float(np.arctan2(rho, model.mu))
    phi = 0.0 if rho < FW_DEGENERATE_TOL else float(np.arctan2(pi2, pi1))
    return FWAngles(theta, phi)


def fw_transform(model: LatticeModel, k) -> tuple[np.ndarray, np.ndarray]:
    """U = exp(-i phi s3/2) exp(-i theta s2/2) and D = U^dagger H(k) U (upper band first)."""
    theta, phi = fw_angles(model, k)
    rz = np.cos(phi / 2) * SIGMA0 - 1j * np.sin(phi / 2) * SIGMA3
    ry = np.cos(theta / 2) * SIGMA0 - 1j * np.sin(theta / 2) * SIGMA2
    u = rz @ ry
    d = u.conj().T @ bloch_at_k(model, k) @ u
    return u, d


def _conjugated_table(model: LatticeModel, element: StabilizerElement) -> CouplingTable:
    s1, s2, s3 = (conjugate(element, s) for s in (SIGMA1, SIGMA2, SIGMA3))
    forward = set(KINETIC_OFFSETS[model.geometry])
    backward = {(-a, -b) for a, b in forward}
    index = {"A": 0, "B": 1}
    hops = []
    onsite = None
    for offset in sorted(forward | backward):
        # Pi1 = Delta (g + g*)/2, Pi2 = i Delta (g - g*)/2 with g = sum_forward e^{ik.X}
        n_fwd, n_bwd = float(offset in forward), float(offset in backward)
        c = 0.5 * model.delta * ((n_fwd + n_bwd) * s1 + 1j * (n_fwd - n_bwd) * s2)
        if offset == (0, 0):
            c = c + model.mu * s3 + model.e0 * SIGMA0
            onsite = (c[0, 0], c[1, 1])
        for to in "AB":
            for frm in "AB":
                if offset == (0, 0) and to == frm:
                    continue
                hops.append(Hop(frm, to, offset, c[index[to], index[frm]]))
    return CouplingTable.from_hops(model.geometry, hops, *onsite)


def rotated_couplings(model: LatticeModel, theta: float) -> TransformedModel:
    """Coupling table of S^-1 H S for S = exp(-i theta s2 / 2)."""
    element = StabilizerElement.rotation(theta, axis=2)
    return TransformedModel(model, element, _conjugated_table(model, element),
                            "rotation", float(theta))


def boosted_couplings(model: LatticeModel, phi: float) -> TransformedModel:
    """Coupling table of S^-1 H S for the boost S = exp(phi s2 / 2)."""
    element = StabilizerElement.boost(phi, axis=2)
    return TransformedModel(model, element, _conjugated_table(model, element),
                            "boost", float(phi))


def transformed_couplings(model: LatticeModel, kind: str, parameter: float) -> TransformedModel:
    if kind == "rotation":
        return rotated_couplings(model, parameter)
    if kind == "boost":
        return boosted_couplings(model, parameter)
    raise ValueError(f"transform kind must be 'rotation' or 'boost', got {kind!r}")


def identity_transform(model: LatticeModel) -> TransformedModel:
    return TransformedModel(model, StabilizerElement.rotation(0.0), base_couplings(model),
                            "rotation", 0.0)


# --------------------------------------------------------------------------
# components and the closed forms


def components(table: CouplingTable) -> dict:
    """Split a table into ``{"H1": [...], "H2": [...], "H3": [...], "V": (a, b)}``."""
    parts = {"H1": [], "H2": [], "H3": []}
    for hop in table.hops:
        parts[f"H{neighbour_order(table.geometry, hop)}"].append(hop)
    parts["V"] = (table.onsite_a, table.onsite_b)
    return parts


def component_norm(table: CouplingTable, order: int) -> float:
    """Frobenius norm of the amplitudes of one neighbour order."""
    return float(np.sqrt(sum(abs(h.amplitude) ** 2 for h in table.by_order(order))))


def _plus_hc(hops, sign=1):
    out = list(hops)
    for h in hops:
        out.append(Hop(h.to, h.frm, (-h.offset[0], -h.offset[1]), sign * np.conj(h.amplitude)))
    return out


def printed_couplings(model: LatticeModel, kind: str, parameter: float) -> CouplingTable:
    """Closed-form tables for the sigma_2 rotation (``parameter`` = angle) and boost.

    Term-by-term transcription of the published expressions.  For the
    honeycomb the bond sums run over the two bonds other than b1
    (i = 2, 3), the only reading that reduces to the undeformed lattice at
    zero angle.  The on-site coefficient is kept as printed, so for the
    honeycomb it does not match the conjugation route.
    """
    d, mu = model.delta, model.mu
    if kind == "rotation":
        c, s = np.cos(parameter), np.sin(parameter)
        inter, intra = d * (c + 1) / 2, d * c - mu * s
        second, third = d * s / 2, d * (c - 1) / 2
        hc_second = 1
    elif kind == "boost":
        c, s = np.cosh(parameter), np.sinh(parameter)
        inter, intra = d * (c + 1) / 2, d * c - 1j * mu * s
        second, third = 1j * d * s / 2, d * (c - 1) / 2
        hc_second = -1
    else:
        raise ValueError(f"unknown kind {kind!r}")

    if model.geometry == "chain":
        # m even <-> A(R); m-1 = B(R-1), m+1 = B(R), m+2 = A(R+1), m+3 = B(R+1)
        inter_offsets = [(-1, 0)]
        v_shift = d * s
        h3 = _plus_hc([Hop("A", "B", (1, 0), third)])
        h2 = _plus_hc([Hop("A", "A", (1, 0), second), Hop("B", "B", (1, 0), -second)], hc_second)
    else:
        # A + b_i sits in cell c_i = b_i - b1: c_2 = (-1, -1), c_3 = (0, -1)
        inter_offsets = [(-1, -1), (0, -1)]
        v_shift = d * s / 2
        h2 = _plus_hc([h for ci in inter_offsets
                       for h in (Hop("A", "A", ci, second), Hop("B", "B", ci, -second))], hc_second)
        h3 = _plus_hc([Hop("A", "B", (-ci[0], -ci[1]), third) for ci in inter_offsets])

    if kind == "rotation":
        h1 = _plus_hc([Hop("A", "B", ci, inter) for ci in inter_offsets]
                      + [Hop("A", "B", (0, 0), intra)])
        v = mu * c + v_shift
    else:
        h1 = []
        for ci in inter_offsets:
            h1 += [Hop("A", "B", ci, inter), Hop("B", "A", (-ci[0], -ci[1]), inter)]
        h1 += [Hop("A", "B", (0, 0), intra), Hop("B", "A", (0, 0), intra)]
        v = mu * c + 1j * v_shift
    return CouplingTable.from_hops(model.geometry, h1 + h2 + h3,
                                   model.e0 + v, model.e0 - v)


def table_differences(a: CouplingTable, b: CouplingTable, tol: float = 1e-12) -> list:
    """Entries where two tables disagree: ``(key, amplitude_a, amplitude_b)``."""
    diffs = []
    for name, va, vb in (("onsite A", a.onsite_a, b.onsite_a), ("onsite B", a.onsite_b, b.onsite_b)):
        if abs(va - vb) > tol:
            diffs.append((name, va, vb))
    amps_a = {h.key: h.amplitude for h in a.hops}
    amps_b = {h.key: h.amplitude for h in b.hops}
    for key in sorted(set(amps_a) | set(amps_b)):
        va, vb = amps_a.get(key, 0.0), amps_b.get(key, 0.0)
        if abs(va - vb) > tol:
            diffs.append((key, va, vb))
    return diffs
