"""MoS2-style monolayer: parameters from band data, the Gamma-M-K-Gamma path,
and comparison against user-supplied reference bands."""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .lattice import LatticeModel, dispersion, reciprocal_vectors, structure_factor
from .stabilizer import TransformedModel

DELTA_MIN = 1e-6
GAMMA = np.array([0.0, 0.0])
K_POINT = np.array([4.0 * np.pi / (3.0 * np.sqrt(3.0)), 0.0])
REFERENCE_HEADER = ["s", "kx", "ky", "band", "energy_ev"]
BANDS = ("upper", "lower")
K_MATCH_TOL = 1e-6


class ReferenceFormatError(ValueError):
    """Malformed reference CSV; ``line`` is 1-based (the header is line 1)."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


def params_from_band_data(e_gap: float, e_bandwidth: float) -> tuple[float, float]:
    """(Delta, mu) from ``E_gap = 2 mu`` and ``E_bandwidth = 2 sqrt(Delta^2 + mu^2)``."""
    if not (np.isfinite(e_gap) and np.isfinite(e_bandwidth)) or not e_bandwidth > e_gap > 0:
        raise ValueError(f"need E_bandwidth > E_gap > 0, got {e_gap!r}, {e_bandwidth!r}")
    mu = e_gap / 2.0
    delta = float(np.sqrt((e_bandwidth / 2.0) ** 2 - mu ** 2))
    if delta < DELTA_MIN:
        raise ValueError(f"hopping {delta:.3e} eV below {DELTA_MIN} eV: flat band")
    return delta, mu


def theta_from_overlap_ratio(t1: float, t2: float) -> float:
    """theta = 2 arctan(t2 / t1)."""
    if not t1 > 0:
        raise ValueError(f"nearest-neighbour overlap must be positive, got {t1!r}")
    if t2 < 0:
        raise ValueError(f"second-neighbour overlap must be non-negative, got {t2!r}")
    return float(2.0 * np.arctan(t2 / t1))


def theta_from_gap_form(t_overlap: float, e_gap: float, e_bandwidth: float) -> float:
    """theta from ``cos theta = 4 t / sqrt(E_bw^2 - E_gap^2) - 1``.

    ``sqrt(E_bw^2 - E_gap^2)`` is ``2 Delta``, so this is ``2 t / Delta - 1``
    and ``t`` is the nearest-neighbour overlap ``Delta (cos theta + 1) / 2``.
    """
    if not e_bandwidth > e_gap > 0:
        raise ValueError(f"need E_bandwidth > E_gap > 0, got {e_gap!r}, {e_bandwidth!r}")
    cos_theta = 4.0 * t_overlap / np.sqrt(e_bandwidth ** 2 - e_gap ** 2) - 1.0
    if not -1.0 <= cos_theta <= 1.0:
        raise ValueError(f"cos theta = {cos_theta!r} is outside [-1, 1]")
    return float(np.arccos(cos_theta))


def model_overlaps(delta: float, theta: float) -> tuple[float, float]:
    """(t1, t2) = (Delta (cos theta + 1) / 2, Delta sin theta / 2) of the rotated honeycomb."""
    return delta * (np.cos(theta) + 1.0) / 2.0, delta * np.sin(theta) / 2.0


def theta_routes(t1: float, t2: float, e_gap: float, e_bandwidth: float) -> dict:
    """Both extraction routes side by side, with their disagreement."""
    ratio = theta_from_overlap_ratio(t1, t2)
    gap_form = theta_from_gap_form(t1, e_gap, e_bandwidth)
    return {"overlap_ratio": ratio, "gap_form": gap_form, "disagreement": abs(ratio - gap_form)}


@dataclass(frozen=True)
class MonolayerParams:
    e_gap: float
    e_bandwidth: float
    t1: float | None = None
    t2: float | None = None

    def __post_init__(self):
        params_from_band_data(self.e_gap, self.e_bandwidth)

    @property
    def delta(self) -> float:
        return params_from_band_data(self.e_gap, self.e_bandwidth)[0]

    @property
    def mu(self) -> float:
        return self.e_gap / 2.0

    @property
    def theta(self) -> float | None:
        if self.t1 is None or self.t2 is None:
            return None
        return theta_from_overlap_ratio(self.t1, self.t2)

    def model(self, e0: float = 0.0) -> LatticeModel:
        return LatticeModel("honeycomb", self.delta, self.mu, e0)


# --------------------------------------------------------------------------
# path


def m_point() -> np.ndarray:
    """Midpoint of the zone edge next to K (the +ky one of the two)."""
    g1, g2 = reciprocal_vectors()
    candidates = [sign * g / 2.0 for g in (g1, g2, g1 - g2) for sign in (1, -1)]
    dist = [np.linalg.norm(c - K_POINT) for c in candidates]
    best = min(dist)
    close = [c for c, d in zip(candidates, dist) if d - best < 1e-12]
    return max(close, key=lambda c: c[1])


@dataclass(frozen=True)
class KPath:
    k: np.ndarray
    s: np.ndarray
    labels: tuple[str | None, ...]


def high_symmetry_path(n_per_segment: int) -> KPath:
    """Gamma -> M -> K -> Gamma with ``n_per_segment`` steps per leg.

    ``s`` is the cumulative path length normalized to [0, 1].
    """
    if n_per_segment < 2:
        raise ValueError("need at least 2 points per segment")
    corners = [("G", GAMMA), ("M", m_point()), ("K", K_POINT), ("G", GAMMA)]
    ks, labels = [], []
    for (name, start), (_, stop) in zip(corners, corners[1:]):
        for j in range(n_per_segment):
            ks.append(start + (stop - start) * j / n_per_segment)
            labels.append(name if j == 0 else None)
    ks.append(GAMMA.copy())
    labels.append("G")
    ks = np.array(ks)
    steps = np.linalg.norm(np.diff(ks, axis=0), axis=1)
    s = np.concatenate([[0.0], np.cumsum(steps)])
    return KPath(ks, s / s[-1], tuple(labels))


def path_gap(model: LatticeModel, path: KPath) -> tuple[float, np.ndarray]:
    """Minimum direct gap along the path and the k where it occurs."""
    e_plus, e_minus = dispersion(model, path.k)
    i = int(np.argmin(e_plus - e_minus))
    return float(e_plus[i] - e_minus[i]), path.k[i]


# --------------------------------------------------------------------------
# reference bands


@dataclass(frozen=True)
class ReferenceBands:
    s: np.ndarray
    k: np.ndarray
    energy: np.ndarray
    band: tuple[str, ...]
    window: tuple[float, float] = (0.0, 1.0)

    def __post_init__(self):
        if len(set(self.band)) < 2:
            raise ValueError("reference needs at least two bands")
        for name in set(self.band):
            s = self.s[np.array(self.band) == name]
            if np.any(np.diff(s) < 0):
                raise ValueError(f"path parameter of band {name!r} is not monotone")
        s0, s1 = self.window
        if not s0 <= s1:
            raise ValueError(f"invalid window {self.window}")

    def with_window(self, window) -> "ReferenceBands":
        return ReferenceBands(self.s, self.k, self.energy, self.band, tuple(float(w) for w in window))

    def mask(self, name: str) -> np.ndarray:
        return np.array(self.band) == name


def reference_from_model(model, path: KPath, offsets: dict | None = None) -> ReferenceBands:
    """Reference sampled from ``model`` itself, optionally shifted per band."""
    offsets = offsets or {}
    upper, lower = model_bands(model, path.k)
    s = np.concatenate([path.s, path.s])
    k = np.concatenate([path.k, path.k])
    energy = np.concatenate([upper + offsets.get("upper", 0.0), lower + offsets.get("lower", 0.0)])
    band = ("upper",) * len(path.s) + ("lower",) * len(path.s)
    return ReferenceBands(s, k, energy, band)


def load_reference_csv(path, window=(0.0, 1.0)) -> ReferenceBands:
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise FileNotFoundError(f"cannot read reference {path}: {exc.strerror}") from exc
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ReferenceFormatError("empty file", 1)
        if [h.strip() for h in header] != REFERENCE_HEADER:
            raise ReferenceFormatError(f"header must be {','.join(REFERENCE_HEADER)}", 1)
        rows = []
        for line, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 5:
                raise ReferenceFormatError(f"expected 5 fields, got {len(row)}", line)
            try:
                s, kx, ky, e = (float(row[i]) for i in (0, 1, 2, 4))
            except ValueError as exc:
                raise ReferenceFormatError(f"bad number ({exc})", line) from None
            if not all(np.isfinite(v) for v in (s, kx, ky, e)):
                raise ReferenceFormatError("non-finite value", line)
            if not 0.0 <= s <= 1.0:
                raise ReferenceFormatError(f"path parameter {s} outside [0, 1]", line)
            band = row[3].strip()
            if band not in BANDS:
                raise ReferenceFormatError(f"band must be one of {BANDS}, got {band!r}", line)
            rows.append((s, kx, ky, band, e, line))
    last: dict = {}
    for s, _, _, band, _, line in rows:
        if band in last and s < last[band]:
            raise ReferenceFormatError(f"path parameter decreases in band {band!r}", line)
        last[band] = s
    if len(last) < 2:
        raise ReferenceFormatError("reference needs both upper and lower bands")
    return ReferenceBands(np.array([r[0] for r in rows]), np.array([[r[1], r[2]] for r in rows]),
                          np.array([r[4] for r in rows]), tuple(r[3] for r in rows),
                          tuple(float(w) for w in window))


def write_reference_csv(path, ref: ReferenceBands) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(REFERENCE_HEADER)
        for s, k, band, e in zip(ref.s, ref.k, ref.band, ref.energy):
            writer.writerow([format(float(s), ".17g"), format(float(k[0]), ".17g"),
                             format(float(k[1]), ".17g"), band, format(float(e), ".17g")])


# --------------------------------------------------------------------------
# comparison


def model_bands(model, ks) -> tuple[np.ndarray, np.ndarray]:
    """(upper, lower) at each k; transformed models are diagonalized directly."""
    ks = np.asarray(ks, dtype=float)
    if isinstance(model, TransformedModel) and model.parameter == 0.0:
        model = model.base
    if isinstance(model, TransformedModel):
        pts = ks[:, 0] if model.base.geometry == "chain" and ks.ndim == 2 else ks
        eig = np.array([np.sort(np.linalg.eigvals(model.bloch(k)).real) for k in pts])
        return eig[:, 1], eig[:, 0]
    if model.geometry == "chain" and ks.ndim == 2:
        ks = ks[:, 0]
    e_plus, e_minus = dispersion(model, ks)
    return np.asarray(e_plus), np.asarray(e_minus)


def _midgap(upper, lower) -> float:
    return 0.5 * (float(np.min(upper)) + float(np.max(lower)))


def band_comparison(model, ref: ReferenceBands, fit_energy_zero: bool = False) -> dict:
    """RMS and max deviation per band inside the validity window.

    With ``fit_energy_zero`` the model is shifted so that its midgap inside
    the window coincides with the reference midgap.
    """
    s0, s1 = ref.window
    inside = (ref.s >= s0) & (ref.s <= s1)
    if not np.any(inside):
        raise ValueError(f"no reference samples inside the window [{s0}, {s1}]")
    upper, lower = model_bands(model, ref.k)
    is_up = ref.mask("upper")
    model_e = np.where(is_up, upper, lower)
    shift = 0.0
    if fit_energy_zero:
        up_in, low_in = inside & is_up, inside & ~is_up
        if not (np.any(up_in) and np.any(low_in)):
            raise ValueError("energy-zero fit needs both bands inside the window")
        shift = _midgap(ref.energy[up_in], ref.energy[low_in]) - _midgap(model_e[up_in], model_e[low_in])
        model_e = model_e + shift
    err = model_e - ref.energy
    rms = {}
    for name in BANDS:
        sel = inside & ref.mask(name)
        rms[name] = float(np.sqrt(np.mean(err[sel] ** 2))) if np.any(sel) else None
    geometry = model.base.geometry if isinstance(model, TransformedModel) else model.geometry
    k_dirac = K_POINT if geometry == "honeycomb" else np.array([np.pi / 2.0, 0.0])
    k_up, k_low = model_bands(model, k_dirac[None, :])
    gap_model = float(k_up[0] - k_low[0])
    gap_ref = _reference_gap_at_k(ref, k_dirac)
    return {
        "rms_ev": rms,
        "max_abs_ev": float(np.max(np.abs(err[inside]))),
        "gap_at_K_ev": gap_model,
        "gap_at_K_reference_ev": gap_ref,
        "gap_at_K_discrepancy_ev": None if gap_ref is None else gap_model - gap_ref,
        "energy_zero_shift_ev": shift,
        "window": [float(s0), float(s1)],
        "n_excluded": int(np.count_nonzero(~inside)),
    }


def _reference_gap_at_k(ref: ReferenceBands, k_dirac: np.ndarray) -> float | None:
    near = np.linalg.norm(ref.k - k_dirac, axis=1) < K_MATCH_TOL
    up, low = near & ref.mask("upper"), near & ref.mask("lower")
    if not (np.any(up) and np.any(low)):
        return None
    return float(np.mean(ref.energy[up]) - np.mean(ref.energy[low]))


def structure_factor_modulus(k) -> float:
    return float(abs(structure_factor("honeycomb", k)))
