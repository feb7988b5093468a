"""Two-material pressurized ring: a self-contained check of the pipeline.

A fine traction-loaded solve stands in for measured motion. Its boundary
displacements drive the contour pipeline on a coarse mesh, and the two
radial displacement fields are compared sector by sector.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .contours import Contour, ContourFrame, ReferencePoint
from .errors import InhomogeneousSpec, LengthMismatch, RadiusOutOfRange, ZeroVariance
from .fem import (
    DEFAULT_TOL,
    DirichletBC,
    DisplacementSolution,
    MaterialParams,
    apply_dirichlet,
    apply_traction,
    assemble_global,
    pressure_tractions,
    solve_system,
)
from .mesh import INNER_BOUNDARY, OUTER_BOUNDARY, Mesh, build_annular_mesh, tag_regions, triangle_areas
from .pipeline import PairResult, PipelineConfig, solve_frame_pair
from .strain import DEFAULT_SECTORS, radial_displacement, sector_index

DEFAULT_COARSE = (64, 8)
DEFAULT_FINE = (256, 16)


@dataclass(frozen=True)
class RingSpec:
    """Ring geometry, load and materials.

    The abnormal (material 1) region is the full-thickness sector
    ``[abnormal_start, abnormal_start + abnormal_span)`` degrees about the
    ring center; a zero span gives a homogeneous ring of material 0.
    """

    inner_radius: float = 1.0
    outer_radius: float = 2.0
    pressure: float = 1.0
    e1: float = 31000.0
    nu1: float = 0.45
    e2: float = 310000.0
    nu2: float = 0.45
    abnormal_start: float = 0.0
    abnormal_span: float = 45.0
    thickness: float = 1.0
    center: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if not 0 < self.inner_radius < self.outer_radius:
            raise ValueError("radii must satisfy 0 < a < b")
        if self.pressure < 0:
            raise ValueError("pressure must be non-negative")
        if not 0 <= self.abnormal_span <= 360:
            raise ValueError("abnormal span must lie in [0, 360]")
        self.materials()

    def materials(self) -> tuple[MaterialParams, MaterialParams]:
        return (MaterialParams(self.e1, self.nu1, self.thickness),
                MaterialParams(self.e2, self.nu2, self.thickness))

    def regions(self) -> tuple:
        if self.abnormal_span == 0:
            return ()
        return ((self.abnormal_start, self.abnormal_span, 1),)

    @property
    def is_homogeneous(self) -> bool:
        return self.abnormal_span == 0 or (self.e1 == self.e2 and self.nu1 == self.nu2)

    @property
    def ref(self) -> ReferencePoint:
        return ReferencePoint(float(self.center[0]), float(self.center[1]))


def ring_contours(spec: RingSpec, points: int, phase: float = 0.5) -> tuple[Contour, Contour]:
    """Regular polygons inscribed in the two circles.

    Vertex ``i`` sits at angle ``2*pi*(i + phase)/points``. The default
    half-step phase keeps every vertex off the 0 degree ray so the
    angular ordering of a slightly rotated copy starts at the same vertex.
    """
    theta = 2 * np.pi * (np.arange(points) + phase) / points
    ring = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    c = np.asarray(spec.center, dtype=float)
    return Contour(c + spec.inner_radius * ring), Contour(c + spec.outer_radius * ring)


def generate_ring_mesh(spec: RingSpec, points: int, layers: int, phase: float = 0.5) -> Mesh:
    if points < 8 or layers < 1:
        raise ValueError(f"need points >= 8 and layers >= 1, got {points}, {layers}")
    inner, outer = ring_contours(spec, points, phase)
    mesh = build_annular_mesh(inner, outer, layers)
    return tag_regions(mesh, spec.regions(), spec.ref)


def lame_reference(r, spec: RingSpec) -> np.ndarray:
    """Closed-form plane-stress radial displacement of a homogeneous
    thick-walled cylinder under internal pressure."""
    if not spec.is_homogeneous:
        raise InhomogeneousSpec("closed form needs a homogeneous ring")
    a, b, p = spec.inner_radius, spec.outer_radius, spec.pressure
    E, nu = spec.e1, spec.nu1
    r = np.asarray(r, dtype=float)
    span = b - a
    if np.any(r < a - 1e-12 * span) or np.any(r > b + 1e-12 * span):
        raise RadiusOutOfRange(f"radius outside [{a}, {b}]")
    return p * a**2 / (E * (b**2 - a**2)) * ((1 - nu) * r + (1 + nu) * b**2 / r)


def remove_rigid_motion(nodes: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Subtract the least-squares translation + infinitesimal rotation."""
    d = nodes - nodes.mean(axis=0)
    n = len(nodes)
    A = np.zeros((2 * n, 3))
    A[0::2, 0] = 1.0
    A[1::2, 1] = 1.0
    A[0::2, 2] = -d[:, 1]
    A[1::2, 2] = d[:, 0]
    coef, *_ = np.linalg.lstsq(A, u.ravel(), rcond=None)
    return (u.ravel() - A @ coef).reshape(-1, 2)


@dataclass(frozen=True, eq=False)
class RingSolution:
    spec: RingSpec
    mesh: Mesh
    solution: DisplacementSolution
    frame0: ContourFrame
    frame1: ContourFrame

    @property
    def u(self) -> np.ndarray:
        return self.solution.u


def reference_pressure_solve(spec: RingSpec, points: int = DEFAULT_FINE[0], layers: int = DEFAULT_FINE[1],
                             tol: float = DEFAULT_TOL, phase: float = 0.5) -> RingSolution:
    """Traction-loaded solve with rigid modes pinned then removed.

    Node 0 is fixed and the diametrically opposite inner node is held in y;
    afterwards the best-fit rigid motion is subtracted so the field does
    not depend on the pin choice.
    """
    mesh = generate_ring_mesh(spec, points, layers, phase)
    system = assemble_global(mesh, spec.materials())
    system = apply_traction(system, pressure_tractions(mesh, INNER_BOUNDARY, spec.pressure))
    pins = [DirichletBC(0, (0.0, 0.0)), DirichletBC(points // 2, (0.0, 0.0), h=((0, 0), (0, 1)))]
    sol = solve_system(apply_dirichlet(system, pins), tol=tol)
    u = remove_rigid_motion(mesh.nodes, sol.u)
    sol = DisplacementSolution(u, sol.residual, sol.method, sol.iterations)

    inner_ids = mesh.boundary_nodes(INNER_BOUNDARY)
    outer_ids = mesh.boundary_nodes(OUTER_BOUNDARY)
    inner0, outer0 = Contour(mesh.nodes[inner_ids]), Contour(mesh.nodes[outer_ids])
    frame0 = ContourFrame(0, inner0, outer0)
    frame1 = ContourFrame(1, Contour(inner0.points + u[inner_ids]), Contour(outer0.points + u[outer_ids]))
    return RingSolution(spec, mesh, sol, frame0, frame1)


def lame_error(spec: RingSpec, points: int, layers: int, tol: float = DEFAULT_TOL) -> float:
    """Relative nodal L2 error of the traction solve's radial displacement."""
    rs = reference_pressure_solve(spec, points, layers, tol)
    ur = radial_displacement(rs.u, rs.mesh.nodes, spec.ref)
    r = np.linalg.norm(rs.mesh.nodes - np.asarray(spec.center), axis=1)
    exact = lame_reference(np.clip(r, spec.inner_radius, spec.outer_radius), spec)
    return float(np.linalg.norm(ur - exact) / np.linalg.norm(exact))


def interpolate_nodal(mesh: Mesh, values: np.ndarray, points: np.ndarray, chunk: int = 256) -> np.ndarray:
    """Linear interpolation of nodal ``values`` at ``points`` inside ``mesh``.

    Each point takes the barycentric combination from the first element
    that contains it (to a relative tolerance of 1e-9).
    """
    values = np.asarray(values, dtype=float)
    points = np.asarray(points, dtype=float)
    c = mesh.element_coords()
    p0 = c[:, 0]
    area2 = 2 * triangle_areas(c)
    e1 = c[:, 1] - p0
    e2 = c[:, 2] - p0
    out = np.empty((len(points),) + values.shape[1:])
    for start in range(0, len(points), chunk):
        pts = points[start:start + chunk]
        d = pts[:, None, :] - p0[None, :, :]
        l1 = (d[..., 0] * e2[:, 1] - d[..., 1] * e2[:, 0]) / area2
        l2 = (e1[:, 0] * d[..., 1] - e1[:, 1] * d[..., 0]) / area2
        l0 = 1.0 - l1 - l2
        inside = (l0 >= -1e-9) & (l1 >= -1e-9) & (l2 >= -1e-9)
        if not np.all(inside.any(axis=1)):
            bad = start + int(np.flatnonzero(~inside.any(axis=1))[0])
            raise ValueError(f"point {points[bad]} lies outside the mesh")
        elem = inside.argmax(axis=1)
        rows = np.arange(len(pts))
        lam = np.stack([l0[rows, elem], l1[rows, elem], l2[rows, elem]], axis=1)
        vals = values[mesh.elements[elem]]
        out[start:start + chunk] = np.einsum("pk,pk...->p...", lam, vals)
    return out


def pearson_correlation(xs, ys) -> float:
    """Product-moment correlation coefficient."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise LengthMismatch(f"need equal-length 1-D inputs, got {x.shape} and {y.shape}")
    if len(x) < 2:
        raise LengthMismatch("need at least 2 samples")
    dx = x - x.mean()
    dy = y - y.mean()
    sx, sy = np.sqrt(dx @ dx), np.sqrt(dy @ dy)
    if sx == 0 or sy == 0:
        raise ZeroVariance("one of the inputs is constant")
    return float(np.clip((dx @ dy) / (sx * sy), -1.0, 1.0))


def sector_correlations(xs, ys, positions, ref: ReferencePoint, n_sectors: int = DEFAULT_SECTORS) -> np.ndarray:
    """Pearson correlation within each angular sector; NaN for sectors with
    fewer than two entries."""
    xs, ys = np.asarray(xs, dtype=float), np.asarray(ys, dtype=float)
    sec = sector_index(positions, ref, n_sectors)
    out = np.full(n_sectors, np.nan)
    for s in range(1, n_sectors + 1):
        m = sec == s
        if m.sum() >= 2:
            out[s - 1] = pearson_correlation(xs[m], ys[m])
    return out


@dataclass(frozen=True, eq=False)
class BenchmarkResult:
    correlations: np.ndarray
    coarse: tuple[int, int]
    fine: tuple[int, int]
    l2_discrepancy: float
    reference: RingSolution
    pair: PairResult
    radial_pipeline: np.ndarray
    radial_reference: np.ndarray

    @property
    def mean_correlation(self) -> float:
        return float(np.mean(self.correlations))


def decimate_frame(frame: ContourFrame, points: int) -> ContourFrame:
    """Keep every k-th contour point so that ``points`` remain."""
    n = len(frame.inner)
    if len(frame.outer) != n or n % points:
        raise ValueError(f"cannot sample {n} contour points down to {points}")
    step = n // points
    return ContourFrame(frame.t, Contour(frame.inner.points[::step]), Contour(frame.outer.points[::step]))


def run_benchmark(spec: RingSpec, coarse=DEFAULT_COARSE, fine=DEFAULT_FINE, tol: float = DEFAULT_TOL,
                  n_sectors: int = DEFAULT_SECTORS) -> BenchmarkResult:
    """Fine traction solve, then the contour pipeline on the coarse mesh,
    then per-sector correlation of the two radial displacement fields at
    the coarse nodes.

    The fine boundary is decimated to the coarse point count in both
    frames, so point ``i`` of frame 0 and frame 1 is the same material
    point; the pipeline then pairs points by angular rank about the
    frame-0 centroid without arc-length resampling. Fine points per ring
    must be a multiple of coarse points per ring.
    """
    coarse, fine = tuple(map(int, coarse)), tuple(map(int, fine))
    ref_sol = reference_pressure_solve(spec, *fine, tol=tol)
    cfg = PipelineConfig(points=coarse[0], layers=coarse[1], sectors=n_sectors, tol=tol,
                         materials=spec.materials(), regions=spec.regions(), resample=False)
    pair = solve_frame_pair(decimate_frame(ref_sol.frame0, coarse[0]),
                            decimate_frame(ref_sol.frame1, coarse[0]), cfg)

    nodes = pair.mesh.nodes
    u_ref = interpolate_nodal(ref_sol.mesh, ref_sol.u, nodes)
    r_pipe = radial_displacement(pair.u, nodes, pair.ref)
    r_ref = radial_displacement(u_ref, nodes, pair.ref)
    corr = sector_correlations(r_pipe, r_ref, nodes, pair.ref, n_sectors)
    l2 = float(np.linalg.norm(pair.u - u_ref) / np.linalg.norm(u_ref)) if np.any(u_ref) else 0.0
    return BenchmarkResult(corr, coarse, fine, l2, ref_sol, pair, r_pipe, r_ref)


def with_pressure(spec: RingSpec, factor: float) -> RingSpec:
    return replace(spec, pressure=spec.pressure * factor)
