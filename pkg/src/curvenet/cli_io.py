"""Network files, trajectory directories, CSV tables and run configuration.

Network files are JSON documents::

    {"version": 1,
     "curves": [{"id": "c0", "samples": [[x, y], ...], "closed": false, "truncated": false}],
     "junctions": [{"ends": [{"curve": "c0", "end": "start"}, ...]}],
     "endpoints": [{"curve": "c0", "end": "finish", "position": [x, y]}],
     "metadata": {}}

Floats are written with ``repr`` precision, so samples round-trip bit for bit.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np
import yaml

from .errors import IntegrityError, MissingSnapshots, ParseError, TopologyError
from .flow_solver import SolverConfig, Termination, Trajectory
from .geometry import CurveEnd, DiscreteCurve, Endpoint, Loop, Network, NetworkTopology

SUPPORTED_VERSIONS = (1,)
NETWORK_SUFFIX = ".network"
OUTPUT_DIR_ENV = "CURVENET_OUTPUT_DIR"
DIAGNOSTIC_COLUMNS = ("t", "L_total", "int_k2", "int_ks2", "min_len", "sup_k")


# ---------------------------------------------------------------------------
# Network files
# ---------------------------------------------------------------------------


def network_to_dict(network: Network, metadata: dict | None = None) -> dict:
    return {
        "version": SUPPORTED_VERSIONS[-1],
        "curves": [
            {
                "id": c.id,
                "samples": c.points.tolist(),
                "closed": c.closed,
                "truncated": c.truncated,
            }
            for c in network.curves
        ],
        "junctions": [
            {"ends": [{"curve": e.curve, "end": e.end} for e in junction]}
            for junction in network.topology.junctions
        ],
        "endpoints": [
            {"curve": ep.end.curve, "end": ep.end.end, "position": list(ep.position)}
            for ep in network.topology.endpoints
        ],
        "metadata": metadata or {},
    }


def _field(obj: dict, key: str, where: str, kind=None):
    if not isinstance(obj, dict) or key not in obj:
        raise ParseError(f"{where}: missing field {key!r}")
    value = obj[key]
    if kind is not None and not isinstance(value, kind):
        raise ParseError(f"{where}.{key}: expected {getattr(kind, '__name__', kind)}, got {type(value).__name__}")
    return value


def _point(value, where: str) -> tuple[float, float]:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ParseError(f"{where}: expected a pair [x, y]")
    try:
        return float(value[0]), float(value[1])
    except (TypeError, ValueError):
        raise ParseError(f"{where}: coordinates must be numbers") from None


def network_from_dict(doc: dict) -> tuple[Network, dict]:
    if not isinstance(doc, dict):
        raise ParseError("top level: expected an object")
    version = _field(doc, "version", "top level")
    if version not in SUPPORTED_VERSIONS:
        raise ParseError(f"version {version!r} is not supported; supported versions: {list(SUPPORTED_VERSIONS)}")
    curves = []
    for i, entry in enumerate(_field(doc, "curves", "top level", list)):
        where = f"curves[{i}]"
        cid = _field(entry, "id", where, str)
        samples = _field(entry, "samples", where, list)
        pts = np.array([_point(p, f"{where}.samples[{j}]") for j, p in enumerate(samples)], dtype=float)
        try:
            curves.append(DiscreteCurve(pts, cid, bool(entry.get("closed", False)), bool(entry.get("truncated", False))))
        except Exception as exc:
            raise ParseError(f"{where} ({cid!r}): {exc}") from None
    ids = {c.id for c in curves}

    def end_ref(obj, where) -> CurveEnd:
        cid = _field(obj, "curve", where, str)
        if cid not in ids:
            raise IntegrityError(f"{where} references missing curve id {cid!r}")
        return CurveEnd(cid, _field(obj, "end", where, str))

    junctions = []
    for p, entry in enumerate(doc.get("junctions", [])):
        ends = _field(entry, "ends", f"junctions[{p}]", list)
        junctions.append(tuple(end_ref(e, f"junctions[{p}].ends[{j}]") for j, e in enumerate(ends)))
    endpoints = []
    for r, entry in enumerate(doc.get("endpoints", [])):
        where = f"endpoints[{r}]"
        endpoints.append(Endpoint(end_ref(entry, where), _point(_field(entry, "position", where), f"{where}.position")))
    try:
        network = Network(tuple(curves), NetworkTopology(tuple(junctions), tuple(endpoints)))
    except TopologyError as exc:
        raise IntegrityError(str(exc)) from None
    metadata = doc.get("metadata", {})
    if not isinstance(metadata, dict):
        raise ParseError("metadata: expected an object")
    return network, metadata


def save_network(network: Network, path, metadata: dict | None = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(network_to_dict(network, metadata), indent=1, allow_nan=False)
    path.write_text(text + "\n")
    return path


def load_network(path, with_metadata: bool = False):
    path = Path(path)
    text = path.read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    try:
        network, metadata = network_from_dict(doc)
    except (ParseError, IntegrityError) as exc:
        raise type(exc)(f"{path}: {exc}") from None
    return (network, metadata) if with_metadata else network


# ---------------------------------------------------------------------------
# CSV tables
# ---------------------------------------------------------------------------


def write_csv(path, columns: Sequence[str], rows: Iterable[Sequence[float]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([repr(float(v)) for v in row])
    return path


def read_csv(path) -> tuple[list[str], np.ndarray]:
    """Header and float table of a CSV written by ``write_csv``."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise ParseError(f"{path}: line {lineno} has {len(row)} fields, header has {len(header)}")
            try:
                rows.append([float(v) for v in row])
            except ValueError as exc:
                raise ParseError(f"{path}: line {lineno}: {exc}") from None
    return header, np.array(rows, dtype=float).reshape(len(rows), len(header))


# ---------------------------------------------------------------------------
# Trajectory directories
# ---------------------------------------------------------------------------


def diagnostic_columns(trajectory: Trajectory) -> list[str]:
    return list(DIAGNOSTIC_COLUMNS) + [f"area_{lp.name}" for lp in trajectory.loops]


def _termination_lines(term: Termination, extra: dict | None = None) -> list[str]:
    lines = [
        f"reason: {term.reason}",
        f"classification: {term.classification}",
        f"t: {term.t!r}",
        f"collapsing_curves: {' '.join(term.collapsing_curves)}",
        f"blowup_curves: {' '.join(term.blowup_curves)}",
    ]
    for key, value in {**term.values, **(extra or {})}.items():
        lines.append(f"{key}: {value!r}")
    return lines


def read_termination(path) -> dict:
    out: dict[str, Any] = {}
    for line in Path(path).read_text().splitlines():
        if not line.strip():
            continue
        key, _, value = line.partition(":")
        value = value.strip()
        if key in ("collapsing_curves", "blowup_curves"):
            out[key] = tuple(value.split())
        elif key in ("reason", "classification"):
            out[key] = value
        else:
            try:
                out[key] = float(value)
            except ValueError:
                out[key] = value
    return out


def save_trajectory(trajectory: Trajectory, directory, extra_termination: dict | None = None) -> Path:
    """Write snapshots/NNNN.network, diagnostics.csv, loops.json and termination.txt."""
    root = Path(directory)
    snap_dir = root / "snapshots"
    snap_dir.mkdir(parents=True, exist_ok=True)
    for old in snap_dir.glob(f"*{NETWORK_SUFFIX}"):
        old.unlink()
    for i, (t, net) in enumerate(trajectory.snapshots):
        save_network(net, snap_dir / f"{i:04d}{NETWORK_SUFFIX}", {"t": t})
    cols = diagnostic_columns(trajectory)
    write_csv(root / "diagnostics.csv", cols, ([row[c] for c in cols] for row in trajectory.diagnostics))
    loops = [{"name": lp.name, "traversals": [list(tr) for tr in lp.traversals]} for lp in trajectory.loops]
    (root / "loops.json").write_text(json.dumps(loops, indent=1) + "\n")
    if trajectory.termination is not None:
        lines = _termination_lines(trajectory.termination, extra_termination)
        (root / "termination.txt").write_text("\n".join(lines) + "\n")
    return root


def load_trajectory(directory) -> Trajectory:
    root = Path(directory)
    snap_files = sorted((root / "snapshots").glob(f"*{NETWORK_SUFFIX}"))
    if not snap_files:
        raise MissingSnapshots(f"{root}: no snapshots found")
    snapshots = []
    for f in snap_files:
        net, meta = load_network(f, with_metadata=True)
        if "t" not in meta:
            raise ParseError(f"{f}: snapshot metadata lacks the time 't'")
        snapshots.append((float(meta["t"]), net))
    header, table = read_csv(root / "diagnostics.csv")
    if len(table) != len(snapshots):
        raise MissingSnapshots(f"{root}: {len(snapshots)} snapshots but {len(table)} diagnostic rows")
    diagnostics = [dict(zip(header, row)) for row in table]
    loops = []
    if (root / "loops.json").exists():
        for entry in json.loads((root / "loops.json").read_text()):
            loops.append(Loop(tuple((cid, bool(rev)) for cid, rev in entry["traversals"]), entry["name"]))
    termination = None
    if (root / "termination.txt").exists():
        rec = read_termination(root / "termination.txt")
        known = {"reason", "classification", "t", "collapsing_curves", "blowup_curves"}
        termination = Termination(
            reason=rec.get("reason", "max-time"),
            t=float(rec.get("t", snapshots[-1][0])),
            classification=rec.get("classification", "none"),
            collapsing_curves=rec.get("collapsing_curves", ()),
            blowup_curves=rec.get("blowup_curves", ()),
            values={k: v for k, v in rec.items() if k not in known},
        )
    return Trajectory(snapshots, diagnostics, loops, termination)


# ---------------------------------------------------------------------------
# Run configuration
# ---------------------------------------------------------------------------


@dataclass
class RunConfig:
    input: str = ""
    dt: float = 1e-4
    t_max: float = 1.0
    n: int | None = None
    L_min: float = 1e-2
    K_max: float = 20.0
    record_every: int = 1
    max_newton_iters: int = 30
    newton_tol: float = 1e-12
    compat_tol: float = 1e-3
    angle_tol: float = 1e-3
    output: str = ""
    make_admissible: bool = False
    length_law: bool = True
    area_law: bool = True
    probes: list = field(default_factory=list)
    density_map: dict | None = None

    def __post_init__(self):
        for name in ("dt", "t_max", "L_min", "K_max", "newton_tol", "compat_tol", "angle_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.record_every < 1 or self.max_newton_iters < 1:
            raise ValueError("record_every and max_newton_iters must be at least 1")
        if self.n is not None and self.n < 3:
            raise ValueError("grid size n must be at least 3")

    def solver_config(self) -> SolverConfig:
        return SolverConfig(
            dt=self.dt,
            max_newton_iters=self.max_newton_iters,
            newton_tol=self.newton_tol,
            L_min=self.L_min,
            K_max=self.K_max,
            record_every=self.record_every,
        )

    def output_dir(self) -> Path:
        if self.output:
            return Path(self.output)
        return Path(os.environ.get(OUTPUT_DIR_ENV, "curvenet-out"))

    @classmethod
    def from_sources(cls, path=None, **overrides) -> "RunConfig":
        """YAML file values, overridden by any non-None keyword."""
        values: dict[str, Any] = {}
        if path is not None:
            loaded = yaml.safe_load(Path(path).read_text()) or {}
            if not isinstance(loaded, dict):
                raise ParseError(f"{path}: configuration must be a mapping")
            known = {f.name for f in fields(cls)}
            unknown = set(loaded) - known
            if unknown:
                raise ParseError(f"{path}: unknown configuration keys {sorted(unknown)}")
            values.update(loaded)
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def as_dict(self) -> dict:
        return asdict(self)
