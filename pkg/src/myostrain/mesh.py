"""Structured triangle meshes of the wall between two index-matched contours."""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .contours import Contour, ReferencePoint, check_nested, polar_angles
from .errors import CountMismatch, GeometryError, InvertedElement

INTERIOR, INNER_BOUNDARY, OUTER_BOUNDARY = 0, 1, 2
BOUNDARY_NAMES = {INTERIOR: "interior", INNER_BOUNDARY: "inner_boundary", OUTER_BOUNDARY: "outer_boundary"}
DEFAULT_LAYERS = 4


@dataclass(frozen=True, eq=False)
class Mesh:
    """Linear triangle mesh.

    Attributes
    ----------
    nodes : (n, 2) array
        Node coordinates; node ``k * M + i`` is point ``i`` of ring ``k``
        for meshes built by :func:`build_annular_mesh`.
    elements : (m, 3) int array
        Counter-clockwise node ids.
    material : (m,) int array
    boundary : (n,) int array
        One of ``INTERIOR``, ``INNER_BOUNDARY``, ``OUTER_BOUNDARY``.
    points_per_ring, layers : int or None
        Structured layout; ``None`` for hand-built meshes.
    """

    nodes: np.ndarray
    elements: np.ndarray
    material: np.ndarray
    boundary: np.ndarray
    points_per_ring: int | None = None
    layers: int | None = None

    def __post_init__(self):
        for name, dtype in (("nodes", float), ("elements", np.int64), ("material", np.int64), ("boundary", np.int64)):
            arr = np.array(getattr(self, name), dtype=dtype)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def from_arrays(cls, nodes, elements, material=None, boundary=None) -> "Mesh":
        nodes = np.asarray(nodes, dtype=float)
        elements = np.asarray(elements, dtype=np.int64)
        if material is None:
            material = np.zeros(len(elements), dtype=np.int64)
        if boundary is None:
            boundary = np.zeros(len(nodes), dtype=np.int64)
        return cls(nodes, elements, material, boundary)

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_elements(self) -> int:
        return len(self.elements)

    def element_coords(self) -> np.ndarray:
        """(m, 3, 2) vertex coordinates per element."""
        return self.nodes[self.elements]

    def element_areas(self) -> np.ndarray:
        return triangle_areas(self.element_coords())

    def element_centroids(self) -> np.ndarray:
        return self.element_coords().mean(axis=1)

    def boundary_nodes(self, kind: int) -> np.ndarray:
        return np.flatnonzero(self.boundary == kind)

    def boundary_edges(self) -> np.ndarray:
        """Edges used by exactly one element, oriented as in that element."""
        e = self.elements
        edges = np.concatenate([e[:, [0, 1]], e[:, [1, 2]], e[:, [2, 0]]])
        key = np.sort(edges, axis=1)
        _, inv, counts = np.unique(key, axis=0, return_inverse=True, return_counts=True)
        return edges[counts[inv.ravel()] == 1]

    def bounding_box_area(self) -> float:
        ext = self.nodes.max(axis=0) - self.nodes.min(axis=0)
        return float(ext[0] * ext[1])


def triangle_areas(coords: np.ndarray) -> np.ndarray:
    """Signed areas of (m, 3, 2) triangles, positive when counter-clockwise."""
    p0, p1, p2 = coords[:, 0], coords[:, 1], coords[:, 2]
    return 0.5 * ((p1[:, 0] - p0[:, 0]) * (p2[:, 1] - p0[:, 1]) - (p2[:, 0] - p0[:, 0]) * (p1[:, 1] - p0[:, 1]))


def build_annular_mesh(inner: Contour, outer: Contour, layers: int = DEFAULT_LAYERS) -> Mesh:
    """Mesh the wall between ``inner`` and ``outer`` with ``layers`` rings of quads,
    each split into two triangles along the (i, k)-(i+1, k+1) diagonal.

    Both contours must be ordered consistently and have the same count M.
    Ring ``k`` holds ``inner + k/L * (outer - inner)``; the result has
    ``M * (L + 1)`` nodes and ``2 * M * L`` triangles.
    """
    m = len(inner)
    if len(outer) != m:
        raise CountMismatch(f"inner has {m} points, outer has {len(outer)}")
    layers = int(layers)
    if layers < 1:
        raise ValueError(f"layers must be >= 1, got {layers}")
    check_nested(inner, outer)

    frac = np.arange(layers + 1) / layers
    a, b = inner.points, outer.points
    nodes = (a[None, :, :] + frac[:, None, None] * (b - a)[None, :, :]).reshape(-1, 2)
    # ring endpoints copied verbatim so boundary nodes equal the contour points bit for bit
    nodes[:m] = a
    nodes[layers * m:] = b

    i = np.arange(m)
    ip = (i + 1) % m
    tris = []
    for k in range(layers):
        n00, n10 = k * m + i, k * m + ip
        n01, n11 = (k + 1) * m + i, (k + 1) * m + ip
        quad = np.stack([np.stack([n00, n11, n10], axis=1), np.stack([n00, n01, n11], axis=1)], axis=1)
        tris.append(quad.reshape(-1, 3))
    elements = np.concatenate(tris)

    boundary = np.full(len(nodes), INTERIOR)
    boundary[:m] = INNER_BOUNDARY
    boundary[layers * m:] = OUTER_BOUNDARY

    areas = triangle_areas(nodes[elements])
    if np.any(areas <= 0):
        bad = int(np.flatnonzero(areas <= 0)[0])
        raise InvertedElement(f"element {bad} has non-positive area {areas[bad]:.3e}; radial lines cross")
    return Mesh(nodes, elements, np.zeros(len(elements), dtype=np.int64), boundary, m, layers)


@dataclass(frozen=True)
class Sector:
    start: float
    span: float
    material_id: int


def region_spec(*sectors) -> tuple[Sector, ...]:
    """Build a region specification from ``(start_deg, span_deg, material_id)`` triples."""
    out = []
    for s in sectors:
        sec = s if isinstance(s, Sector) else Sector(float(s[0]), float(s[1]), int(s[2]))
        if not (sec.span > 0 and sec.span <= 360):
            raise ValueError(f"sector span must be in (0, 360], got {sec.span}")
        if sec.material_id < 0:
            raise ValueError(f"invalid material id {sec.material_id}")
        out.append(sec)
    return tuple(out)


def in_sector(angle_deg: np.ndarray, sector: Sector) -> np.ndarray:
    """Half-open membership ``[start, start + span)`` with wrap-around at 360."""
    rel = np.mod(np.asarray(angle_deg) - sector.start, 360.0)
    rel = np.where(rel >= 360.0, 0.0, rel)
    return rel < sector.span


def tag_regions(mesh: Mesh, spec, ref: ReferencePoint) -> Mesh:
    """Assign material ids by element-centroid angle about ``ref``.

    The first matching sector wins; unmatched elements get material 0.
    """
    spec = region_spec(*spec)
    angles = np.degrees(polar_angles(mesh.element_centroids(), ref))
    material = np.zeros(mesh.n_elements, dtype=np.int64)
    assigned = np.zeros(mesh.n_elements, dtype=bool)
    for sec in spec:
        hit = in_sector(angles, sec) & ~assigned
        material[hit] = sec.material_id
        assigned |= hit
    return replace(mesh, material=material)


@dataclass(frozen=True)
class MeshQuality:
    min_area: float
    max_area: float
    min_angle: float
    max_angle: float
    max_aspect_ratio: float


def mesh_quality_report(mesh: Mesh) -> MeshQuality:
    """Extreme element areas, interior angles (degrees) and aspect ratios.

    Aspect ratio is circumradius / (2 * inradius): 1 for an equilateral
    triangle, growing without bound for slivers.
    """
    c = mesh.element_coords()
    area = triangle_areas(c)
    if np.any(area <= 0):
        raise GeometryError("mesh has non-positive element areas")
    e0 = np.linalg.norm(c[:, 2] - c[:, 1], axis=1)
    e1 = np.linalg.norm(c[:, 0] - c[:, 2], axis=1)
    e2 = np.linalg.norm(c[:, 1] - c[:, 0], axis=1)
    lengths = np.stack([e0, e1, e2], axis=1)
    angles = []
    for k in range(3):
        opp = lengths[:, k]
        s1, s2 = lengths[:, (k + 1) % 3], lengths[:, (k + 2) % 3]
        cos = np.clip((s1**2 + s2**2 - opp**2) / (2 * s1 * s2), -1.0, 1.0)
        angles.append(np.degrees(np.arccos(cos)))
    angles = np.stack(angles, axis=1)
    semi = lengths.sum(axis=1) / 2
    inradius = area / semi
    circumradius = lengths.prod(axis=1) / (4 * area)
    return MeshQuality(
        min_area=float(area.min()),
        max_area=float(area.max()),
        min_angle=float(angles.min()),
        max_angle=float(angles.max()),
        max_aspect_ratio=float((circumradius / (2 * inradius)).max()),
    )
