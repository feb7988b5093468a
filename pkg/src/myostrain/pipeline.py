"""Contour documents in, displacement/strain/sector tables out.

A contour document is JSON::

    {"subject": "S01", "slice": 3,
     "frames": [{"t": 0, "inner": [[x, y], ...], "outer": [[x, y], ...]}, ...]}

Each consecutive frame pair (t, t+1) is processed on its own: reference
point from frame t's inner contour, both frames ordered and resampled,
wall meshed on frame t, boundary displacements imposed, strain computed.
"""
from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .contours import (
    DEFAULT_POINTS,
    BoundaryDisplacementField,
    ContourFrame,
    ReferencePoint,
    compute_boundary_displacements,
    normalize_contour,
    prepare_pair,
)
from .errors import GeometryError, MyostrainError, ParseError, SchemaViolation
from .fem import DEFAULT_TOL, DisplacementSolution, MaterialParams, solve_dirichlet
from .mesh import (
    BOUNDARY_NAMES,
    DEFAULT_LAYERS,
    INNER_BOUNDARY,
    OUTER_BOUNDARY,
    Mesh,
    build_annular_mesh,
    region_spec,
    tag_regions,
)
from .strain import (
    DEFAULT_SECTORS,
    STRAIN_COMPONENTS,
    SectorReport,
    element_sector_report,
    element_strains,
    radial_displacement,
    sector_index,
)

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
DEFAULT_MATERIAL = MaterialParams(31000.0, 0.45)


@dataclass(frozen=True)
class ContourDocument:
    subject: str
    slice: int
    frames: tuple[ContourFrame, ...]


@dataclass(frozen=True)
class PipelineConfig:
    points: int = DEFAULT_POINTS
    layers: int = DEFAULT_LAYERS
    sectors: int = DEFAULT_SECTORS
    tol: float = DEFAULT_TOL
    materials: tuple[MaterialParams, ...] = (DEFAULT_MATERIAL,)
    regions: tuple = ()
    out_dir: str | None = None
    method: str = "direct"
    resample: bool = True

    def __post_init__(self):
        for name in ("points", "layers", "sectors"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be positive")
        if self.points < 3:
            raise ValueError("points must be >= 3")
        if not 0.0 < self.tol <= 1e-4:
            raise ValueError(f"tol must lie in (0, 1e-4], got {self.tol}")
        object.__setattr__(self, "regions", region_spec(*self.regions))
        for sec in self.regions:
            if sec.material_id >= len(self.materials):
                raise ValueError(f"region material {sec.material_id} not in material table")


@dataclass(frozen=True, eq=False)
class PairResult:
    t0: int
    t1: int
    ref: ReferencePoint
    frame0: ContourFrame
    frame1: ContourFrame
    boundary: BoundaryDisplacementField
    mesh: Mesh
    solution: DisplacementSolution
    strains: np.ndarray
    radial: np.ndarray
    sectors: SectorReport

    @property
    def u(self) -> np.ndarray:
        return self.solution.u


@dataclass(eq=False)
class OutputBundle:
    subject: str
    slice: int
    pairs: list[PairResult] = field(default_factory=list)
    failures: list[tuple[int, int, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


# ---------------------------------------------------------------- loading

def _point_list(raw, where: str) -> np.ndarray:
    if not isinstance(raw, list) or not raw:
        raise SchemaViolation(f"{where}: expected a non-empty list of [x, y] pairs")
    for j, p in enumerate(raw):
        if (not isinstance(p, list) or len(p) != 2
                or not all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in p)):
            raise SchemaViolation(f"{where}[{j}]: expected [x, y] with numeric coordinates, got {p!r}")
    return np.array(raw, dtype=float)


def document_from_dict(data) -> ContourDocument:
    """Validate a parsed contour document and build normalized frames."""
    if not isinstance(data, dict):
        raise SchemaViolation("top level must be an object")
    for key in ("subject", "slice", "frames"):
        if key not in data:
            raise SchemaViolation(f"missing top-level key {key!r}")
    if not isinstance(data["subject"], str):
        raise SchemaViolation("'subject' must be a string")
    if not isinstance(data["slice"], int) or isinstance(data["slice"], bool):
        raise SchemaViolation("'slice' must be an integer")
    raw_frames = data["frames"]
    if not isinstance(raw_frames, list) or len(raw_frames) < 2:
        raise SchemaViolation("'frames' must be a list of at least 2 frames")

    frames = []
    for k, fr in enumerate(raw_frames):
        where = f"frame {k}"
        if not isinstance(fr, dict):
            raise SchemaViolation(f"{where}: expected an object")
        for key in ("t", "inner", "outer"):
            if key not in fr:
                raise SchemaViolation(f"{where}: missing key {key!r}")
        if not isinstance(fr["t"], int) or isinstance(fr["t"], bool):
            raise SchemaViolation(f"{where}: 't' must be an integer")
        if frames and fr["t"] <= frames[-1].t:
            raise SchemaViolation(f"{where}: t={fr['t']} does not increase")
        inner = _point_list(fr["inner"], f"{where}.inner")
        outer = _point_list(fr["outer"], f"{where}.outer")
        try:
            frames.append(ContourFrame(fr["t"], normalize_contour(inner), normalize_contour(outer)))
        except GeometryError as exc:
            raise type(exc)(f"{where} (t={fr['t']}): {exc}") from exc
    return ContourDocument(data["subject"], data["slice"], tuple(frames))


def load_contours(path) -> ContourDocument:
    """Read and validate a contour document.

    Raises
    ------
    ParseError
        Malformed JSON (message carries line and column).
    SchemaViolation
        Missing or mistyped fields; names the offending frame.
    GeometryError
        Self-intersecting or non-nested contours; names the offending frame.
    """
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return document_from_dict(data)


def document_to_dict(doc: ContourDocument) -> dict:
    return {
        "subject": doc.subject,
        "slice": doc.slice,
        "frames": [{"t": f.t, "inner": f.inner.points.tolist(), "outer": f.outer.points.tolist()}
                   for f in doc.frames],
    }


def save_contours(doc: ContourDocument, path) -> None:
    Path(path).write_text(json.dumps(document_to_dict(doc), indent=1) + "\n")


# ---------------------------------------------------------------- processing

def solve_frame_pair(frame0: ContourFrame, frame1: ContourFrame, cfg: PipelineConfig) -> PairResult:
    """Displacement and strain of the wall between two frames."""
    ref, f0, f1 = prepare_pair(frame0, frame1, cfg.points if cfg.resample else None)
    bd = compute_boundary_displacements(f0, f1)
    mesh = build_annular_mesh(f0.inner, f0.outer, cfg.layers)
    if cfg.regions:
        mesh = tag_regions(mesh, cfg.regions, ref)
    nodes = np.concatenate([mesh.boundary_nodes(INNER_BOUNDARY), mesh.boundary_nodes(OUTER_BOUNDARY)])
    values = np.concatenate([bd.inner, bd.outer])
    sol = solve_dirichlet(mesh, cfg.materials, nodes, values, tol=cfg.tol, method=cfg.method)
    strains = element_strains(mesh, sol.u)
    return PairResult(
        t0=frame0.t, t1=frame1.t, ref=ref, frame0=f0, frame1=f1, boundary=bd, mesh=mesh,
        solution=sol, strains=strains,
        radial=radial_displacement(sol.u, mesh.nodes, ref),
        sectors=element_sector_report(mesh, strains, ref, cfg.sectors),
    )


def run_deformation_pipeline(doc: ContourDocument, cfg: PipelineConfig | None = None,
                             raise_errors: bool = True) -> OutputBundle:
    """Process every consecutive frame pair of ``doc``.

    With ``raise_errors=False`` failing pairs are recorded in
    ``bundle.failures`` and the remaining pairs still run.
    """
    cfg = cfg or PipelineConfig()
    bundle = OutputBundle(doc.subject, doc.slice)
    for f0, f1 in zip(doc.frames[:-1], doc.frames[1:]):
        try:
            bundle.pairs.append(solve_frame_pair(f0, f1, cfg))
        except MyostrainError as exc:
            msg = f"frames {f0.t}->{f1.t}: {exc}"
            if raise_errors:
                raise type(exc)(msg) from exc
            log.error(msg)
            bundle.failures.append((f0.t, f1.t, str(exc)))
    return bundle


# ---------------------------------------------------------------- output

def _fmt(x) -> str:
    x = float(x)
    return "" if np.isnan(x) else repr(x)


def _csv_writer(fh):
    fh.write(f"# schema_version={SCHEMA_VERSION}\n")
    return csv.writer(fh, lineterminator="\n")


def write_mesh(mesh: Mesh, path) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(f"# schema_version={SCHEMA_VERSION}\n")
        fh.write(f"{mesh.n_nodes}\n")
        for i, (p, b) in enumerate(zip(mesh.nodes, mesh.boundary)):
            fh.write(f"{i} {_fmt(p[0])} {_fmt(p[1])} {BOUNDARY_NAMES[int(b)]}\n")
        fh.write(f"{mesh.n_elements}\n")
        for i, (e, m) in enumerate(zip(mesh.elements, mesh.material)):
            fh.write(f"{i} {e[0]} {e[1]} {e[2]} {m}\n")


def write_outputs(bundle: OutputBundle, out_dir) -> list[Path]:
    """Write per-pair CSV tables, the sector summary and mesh listings.

    Returns the written paths. Identical bundles give byte-identical files.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for pr in bundle.pairs:
        tag = f"{pr.t0}_{pr.t1}"
        path = out / f"displacements_{tag}.csv"
        with open(path, "w", newline="") as fh:
            w = _csv_writer(fh)
            w.writerow(["node_id", "x", "y", "u", "v", "u_radial"])
            for i, (p, u, ur) in enumerate(zip(pr.mesh.nodes, pr.u, pr.radial)):
                w.writerow([i, _fmt(p[0]), _fmt(p[1]), _fmt(u[0]), _fmt(u[1]), _fmt(ur)])
        written.append(path)

        path = out / f"strain_elements_{tag}.csv"
        cen = pr.mesh.element_centroids()
        sec = sector_index(cen, pr.ref, pr.sectors.n_sectors)
        with open(path, "w", newline="") as fh:
            w = _csv_writer(fh)
            w.writerow(["elem_id", "centroid_x", "centroid_y", *STRAIN_COMPONENTS, "sector"])
            for i, (c, s, k) in enumerate(zip(cen, pr.strains, sec)):
                w.writerow([i, _fmt(c[0]), _fmt(c[1]), _fmt(s[0]), _fmt(s[1]), _fmt(s[2]), int(k)])
        written.append(path)

        path = out / f"mesh_{pr.t0}.txt"
        write_mesh(pr.mesh, path)
        written.append(path)

    path = out / "sector_strain.csv"
    with open(path, "w", newline="") as fh:
        w = _csv_writer(fh)
        w.writerow(["pair", "sector", *(f"mean_{c}" for c in STRAIN_COMPONENTS)])
        for pr in bundle.pairs:
            for s, m in enumerate(pr.sectors.means, start=1):
                w.writerow([f"{pr.t0}_{pr.t1}", s, *(_fmt(v) for v in m)])
    written.append(path)

    # wide tables, one per strain component: a row per pair, a column per sector
    for j, comp in enumerate(STRAIN_COMPONENTS):
        path = out / f"sector_series_{comp}.csv"
        with open(path, "w", newline="") as fh:
            w = _csv_writer(fh)
            n = bundle.pairs[0].sectors.n_sectors if bundle.pairs else 0
            w.writerow(["t0", "t1", *(f"sector_{s}" for s in range(1, n + 1))])
            for pr in bundle.pairs:
                w.writerow([pr.t0, pr.t1, *(_fmt(v) for v in pr.sectors.means[:, j])])
        written.append(path)
    return written
