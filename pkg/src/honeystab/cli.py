"""Command-line front end: ``bands``, ``transform``, ``verify`` and ``compare``.

Every run is driven by one JSON config file.  Outputs are deterministic: a
fixed float format, fixed iteration orders, and numpy's PCG64 generator
(``default_rng(seed)``) for the random samples used by ``verify``.

Exit codes: 0 success, 1 verification failure, 2 usage or input error.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .algebra import clifford_residual, conjugate, exp_generator, gamma_set
from .lattice import (GEOMETRIES, LatticeModel, dirac_points, dispersion, kinetic_of_k,
                      mass_shell_residual)
from .monolayer import (ReferenceBands, ReferenceFormatError, band_comparison,
                        high_symmetry_path, load_reference_csv)
from .ptsym import (pseudo_hermiticity_residual, pt_odd_perturbation, pt_residual,
                    sample_kinetic, transformed_family, base_family)
from .realspace import BOUNDARIES, bloch_spectrum_multiset, finite_spectrum, multiset_distance
from .serialize import dumps
from .stabilizer import (TransformedModel, fw_transform, identity_transform, transform_bloch,
                         transformed_couplings)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

DEFAULT_TOLERANCES = {
    "clifford": 1e-12,
    "isospectrality": 1e-10,
    "gap_invariance": 1e-9,
    "coupling_decomposition": 1e-12,
    "foldy_wouthuysen": 1e-12,
    "pt_symmetry": 1e-12,
    "pseudo_hermiticity": 1e-12,
    "bloch_realspace": 1e-8,
    "mass_shell": 1e-12,
}


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    geometry: str
    delta: float = 1.0
    mu: float = 0.0
    e0: float = 0.0
    transform: str | None = None
    parameter: float = 0.0
    extent: tuple[int, ...] | None = None
    boundary: str = "periodic"
    n_k: int = 201
    n_per_segment: int = 50
    n_random: int = 200
    reference: str | None = None
    window: tuple[float, float] = (0.0, 1.0)
    fit_energy_zero: bool = False
    seed: int = 0
    perturbation: float = 0.0
    tolerances: dict = field(default_factory=dict)
    out: str | None = None

    def __post_init__(self):
        if self.geometry not in GEOMETRIES:
            raise UsageError(f"geometry must be one of {GEOMETRIES}")
        if self.transform not in (None, "rotation", "boost"):
            raise UsageError("transform must be 'rotation', 'boost' or null")
        if self.boundary not in BOUNDARIES:
            raise UsageError(f"boundary must be one of {BOUNDARIES}")
        unknown = set(self.tolerances) - set(DEFAULT_TOLERANCES)
        if unknown:
            raise UsageError(f"unknown tolerance keys: {sorted(unknown)}")
        if self.n_k < 2 or self.n_per_segment < 2 or self.n_random < 1:
            raise UsageError("sample counts too small")

    @property
    def cells(self) -> tuple[int, ...]:
        if self.extent is not None:
            return tuple(self.extent)
        return (20,) if self.geometry == "chain" else (6, 6)

    def model(self) -> LatticeModel:
        return LatticeModel(self.geometry, self.delta, self.mu, self.e0)

    def transformed(self) -> TransformedModel:
        if self.transform is None:
            return identity_transform(self.model())
        return transformed_couplings(self.model(), self.transform, self.parameter)

    def tolerance(self, name: str, override: float | None = None) -> float:
        if override is not None:
            return override
        return float(self.tolerances.get(name, DEFAULT_TOLERANCES[name]))

    def to_dict(self) -> dict:
        data = dataclasses.asdict(self)
        data["extent"] = list(self.cells)
        data["window"] = list(self.window)
        return data


_FIELDS = {f.name: f for f in dataclasses.fields(RunConfig)}


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from None
    if not text.strip():
        raise UsageError(f"config {path} is empty")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict) or not data:
        raise UsageError(f"config {path} must be a non-empty JSON object")
    return config_from_dict(data, base_dir=Path(path).parent)


def config_from_dict(data: dict, base_dir: Path | None = None) -> RunConfig:
    unknown = sorted(set(data) - set(_FIELDS))
    if unknown:
        raise UsageError(f"unknown config keys: {unknown}")
    if "geometry" not in data:
        raise UsageError("config must set 'geometry'")
    data = dict(data)
    for key in ("delta", "mu", "e0", "parameter", "perturbation"):
        if key in data and (isinstance(data[key], bool) or not isinstance(data[key], (int, float))):
            raise UsageError(f"'{key}' must be a number")
    if "extent" in data and data["extent"] is not None:
        ext = data["extent"]
        ext = [ext] if isinstance(ext, int) else ext
        if not isinstance(ext, list) or not all(isinstance(e, int) and e > 0 for e in ext):
            raise UsageError("'extent' must be a positive integer or list of them")
        data["extent"] = tuple(ext)
    if "window" in data:
        w = data["window"]
        if not (isinstance(w, list) and len(w) == 2 and 0 <= w[0] <= w[1] <= 1):
            raise UsageError("'window' must be [s0, s1] with 0 <= s0 <= s1 <= 1")
        data["window"] = (float(w[0]), float(w[1]))
    if data.get("reference") is not None and base_dir is not None:
        ref = Path(data["reference"])
        data["reference"] = str(ref if ref.is_absolute() else base_dir / ref)
    try:
        config = RunConfig(**data)
        want = 1 if config.geometry == "chain" else 2
        if len(config.cells) != want:
            raise UsageError(f"{config.geometry} extent needs {want} entries")
        config.model()
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    return config


# --------------------------------------------------------------------------
# band sampling


def band_samples(config: RunConfig):
    """(s, k as 2-vectors, labels) along the chain zone [0, pi] or the honeycomb path."""
    if config.geometry == "chain":
        k = np.pi * (np.arange(config.n_k) / (config.n_k - 1))
        s = (k - k[0]) / (k[-1] - k[0])
        labels = [None] * len(k)
        return s, np.column_stack([k, np.zeros_like(k)]), labels
    path = high_symmetry_path(config.n_per_segment)
    return path.s, path.k, list(path.labels)


def _bands_of(tm: TransformedModel, ks: np.ndarray):
    if tm.kind == "rotation" and tm.parameter == 0.0:
        pts = ks[:, 0] if tm.base.geometry == "chain" else ks
        return dispersion(tm.base, pts)
    pts = ks[:, 0] if tm.base.geometry == "chain" else ks
    eig = np.array([np.sort(np.linalg.eigvals(tm.bloch(k)).real) for k in pts])
    return eig[:, 1], eig[:, 0]


def cmd_bands(config: RunConfig, out: Path) -> int:
    tm = config.transformed()
    s, ks, labels = band_samples(config)
    upper, lower = _bands_of(tm, ks)
    lines = ["s,kx,ky,band,energy_ev"]
    for name, energies in (("upper", upper), ("lower", lower)):
        for si, k, e in zip(s, ks, energies):
            lines.append(",".join([format(float(si), ".17g"), format(float(k[0]), ".17g"),
                                   format(float(k[1]), ".17g"), name, format(float(e), ".17g")]))
    dirac = [np.atleast_1d(p).tolist() for p in dirac_points(config.model())]
    gap = upper - lower
    i = int(np.argmin(gap))
    summary = {
        "geometry": config.geometry,
        "transform": tm.header(),
        "n_samples": int(len(s)),
        "gap_ev": float(gap[i]),
        "gap_k": ks[i].tolist() if config.geometry == "honeycomb" else [float(ks[i, 0])],
        "bandwidth_ev": float(np.max(upper) - np.min(lower)),
        "dirac_points": dirac,
    }
    _write(out / "bands.csv", "\n".join(lines) + "\n")
    _write(out / "bands_summary.json", dumps(summary))
    print(f"gap {summary['gap_ev']:.12g} eV, bandwidth {summary['bandwidth_ev']:.12g} eV")
    return EXIT_OK


def cmd_transform(config: RunConfig, out: Path) -> int:
    if config.transform is None:
        raise UsageError("transform needs 'transform' set to 'rotation' or 'boost'")
    tm = config.transformed()
    table = tm.couplings
    data = tm.to_dict()
    classes = {name: len(hops) for name, hops in table.coupling_classes().items()}
    data["coupling_classes"] = classes
    _write(out / "couplings.json", dumps(data))
    max2 = max((abs(h.amplitude) for h in table.by_order(2)), default=0.0)
    max3 = max((abs(h.amplitude) for h in table.by_order(3)), default=0.0)
    beyond = sorted(c for c in classes if not c.startswith("1:"))
    print(f"hermitian: {str(table.hermitian).lower()}")
    print(f"max second-neighbour amplitude: {max2:.12g} eV")
    print(f"max third-neighbour amplitude: {max3:.12g} eV")
    print(f"coupling classes beyond nearest: {len(beyond)} {beyond}")
    return EXIT_OK


# --------------------------------------------------------------------------
# verification


def _random_k(config: RunConfig, rng, n: int) -> np.ndarray:
    if config.geometry == "chain":
        return rng.uniform(-np.pi, np.pi, size=n)
    return rng.uniform(-np.pi, np.pi, size=(n, 2))


def _check(name: str, value: float, tol: float, **extra) -> dict:
    entry = {"name": name, "passed": bool(value < tol), "value": float(value), "tolerance": tol}
    entry.update(extra)
    return entry


def run_checks(config: RunConfig, tolerance: float | None = None) -> list:
    rng = np.random.default_rng(config.seed)
    model = config.model()
    tm = config.transformed()
    s = tm.element
    ks = _random_k(config, rng, config.n_random)
    checks = []

    # Clifford relations, before and after random SL(2,C) conjugation
    worst = gamma_set().clifford_residual()
    for _ in range(100):
        a = rng.normal(size=3) + 1j * rng.normal(size=3)
        elem = exp_generator(0.5 * a)
        worst = max(worst, clifford_residual([conjugate(elem, g) for g in gamma_set().matrices]))
    checks.append(_check("clifford", worst, config.tolerance("clifford", tolerance)))

    e_plus, e_minus = dispersion(model, ks)
    iso = decomposition = shell = 0.0
    for k, ep, em in zip(ks, e_plus, e_minus):
        h_t = transform_bloch(s, model, k)
        ev = np.sort(np.linalg.eigvals(tm.bloch(k)).real)
        iso = max(iso, abs(ev[0] - em), abs(ev[1] - ep))
        decomposition = max(decomposition, float(np.max(np.abs(tm.bloch(k) - h_t))))
        shell = max(shell, mass_shell_residual(model, k))
    checks.append(_check("isospectrality", iso, config.tolerance("isospectrality", tolerance)))
    checks.append(_check("coupling_decomposition", decomposition,
                         config.tolerance("coupling_decomposition", tolerance)))
    checks.append(_check("mass_shell", shell, config.tolerance("mass_shell", tolerance)))

    _, path_k, _ = band_samples(dataclasses.replace(config, n_k=401, n_per_segment=134))
    upper, lower = _bands_of(tm, path_k)
    gap_err = abs(float(np.min(upper - lower)) - 2.0 * abs(model.mu))
    checks.append(_check("gap_invariance", gap_err, config.tolerance("gap_invariance", tolerance)))

    fw = 0.0
    for k in ks:
        pi = kinetic_of_k(model, k)
        if np.hypot(*pi) < 1e-8:
            continue
        u, d = fw_transform(model, k)
        ep, em = dispersion(model, k)
        fw = max(fw, float(np.max(np.abs(u.conj().T @ u - np.eye(2)))),
                 abs(d[0, 1]), abs(d[1, 0]), abs(d[0, 0] - ep), abs(d[1, 1] - em))
    checks.append(_check("foldy_wouthuysen", fw, config.tolerance("foldy_wouthuysen", tolerance)))

    samples = sample_kinetic(seed=config.seed)
    family = transformed_family(s, model) if tm.kind == "boost" else base_family(model)
    if config.perturbation:
        x = pt_odd_perturbation(config.perturbation, seed=config.seed)
        clean = family
        family = lambda pi: clean(pi) + x  # noqa: E731
    checks.append(_check("pt_symmetry", pt_residual(family, samples),
                         config.tolerance("pt_symmetry", tolerance),
                         family="boosted" if tm.kind == "boost" else "base",
                         perturbation=config.perturbation))
    pseudo = max(pseudo_hermiticity_residual(s, transformed_family(s, model)(pi)) for pi in samples)
    checks.append(_check("pseudo_hermiticity", pseudo, config.tolerance("pseudo_hermiticity", tolerance)))

    finite = finite_spectrum(tm, config.cells, "periodic")
    bloch = bloch_spectrum_multiset(tm, config.cells)
    checks.append(_check("bloch_realspace", multiset_distance(finite, bloch),
                         config.tolerance("bloch_realspace", tolerance),
                         extent=list(config.cells), max_im=float(np.max(np.abs(finite.imag)))))
    return checks


def cmd_verify(config: RunConfig, out: Path, tolerance: float | None = None) -> int:
    checks = run_checks(config, tolerance)
    passed = all(c["passed"] for c in checks)
    report = {"version": __version__, "config": config.to_dict(), "passed": passed, "checks": checks}
    _write(out / "verify_report.json", dumps(report))
    for c in checks:
        print(f"{'PASS' if c['passed'] else 'FAIL'} {c['name']}: {c['value']:.3e} < {c['tolerance']:.1e}")
    return EXIT_OK if passed else EXIT_FAIL


def cmd_compare(config: RunConfig, out: Path, tolerance: float | None = None) -> int:
    if config.reference is None:
        raise UsageError("compare needs 'reference' (path to a band CSV)")
    try:
        ref: ReferenceBands = load_reference_csv(config.reference, config.window)
    except FileNotFoundError as exc:
        raise UsageError(str(exc)) from None
    except ReferenceFormatError as exc:
        raise UsageError(f"{config.reference}: {exc}") from None
    try:
        report = band_comparison(config.transformed(), ref, config.fit_energy_zero)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    status = EXIT_OK
    if tolerance is not None:
        report["tolerance_ev"] = tolerance
        report["passed"] = report["max_abs_ev"] <= tolerance
        status = EXIT_OK if report["passed"] else EXIT_FAIL
    _write(out / "compare_report.json", dumps(report))
    print(f"max |dE| = {report['max_abs_ev']:.6g} eV over window {report['window']}, "
          f"{report['n_excluded']} samples excluded")
    return status


# --------------------------------------------------------------------------


def _write(path: Path, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="honeystab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="JSON run configuration")
    common.add_argument("--out", default=None, help="output directory (default: config 'out' or .)")
    common.add_argument("--tolerance", type=float, default=None,
                        help="override every check tolerance (verify) or the max error (compare)")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("bands", parents=[common], help="sample bands, write CSV and summary")
    sub.add_parser("transform", parents=[common], help="write the transformed coupling table")
    sub.add_parser("verify", parents=[common], help="run the invariant suite")
    sub.add_parser("compare", parents=[common], help="compare against reference bands")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config)
        out = Path(args.out or config.out or ".")
        if not out.is_dir():
            raise UsageError(f"output directory {out} does not exist")
        if args.command == "bands":
            return cmd_bands(config, out)
        if args.command == "transform":
            return cmd_transform(config, out)
        if args.command == "verify":
            return cmd_verify(config, out, args.tolerance)
        return cmd_compare(config, out, args.tolerance)
    except UsageError as exc:
        print(f"honeystab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
