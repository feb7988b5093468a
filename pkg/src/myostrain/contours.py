"""Contour handling: reference point, angular ordering, arc-length
resampling and boundary displacements between two frames.

Contours are closed polygons stored as ``(n, 2)`` float arrays without a
repeated closing vertex. After normalization every contour runs
counter-clockwise.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import shapely

from .errors import (
    CountMismatch,
    CountTooSmall,
    DegenerateAngle,
    EmptyContour,
    GeometryError,
    NonNestedContours,
    RefOutsideContour,
    SelfIntersection,
)

TWO_PI = 2.0 * np.pi
DEFAULT_POINTS = 32
_MERGE_RTOL = 1e-9


def signed_area(points: np.ndarray) -> float:
    """Shoelace area; positive for counter-clockwise vertex order."""
    x, y = points[:, 0], points[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def perimeter(points: np.ndarray) -> float:
    return float(np.linalg.norm(np.roll(points, -1, axis=0) - points, axis=1).sum())


@dataclass(frozen=True, eq=False)
class Contour:
    """Closed polygon with an implicit edge from the last point to the first."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise GeometryError(f"contour points must have shape (n, 2), got {pts.shape}")
        if len(pts) < 3:
            raise EmptyContour(f"contour needs at least 3 points, got {len(pts)}")
        if not np.all(np.isfinite(pts)):
            raise GeometryError("contour has non-finite coordinates")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return len(self.points)

    @property
    def orientation(self) -> str:
        return "counter_clockwise" if signed_area(self.points) > 0 else "clockwise"

    @property
    def area(self) -> float:
        return signed_area(self.points)

    @property
    def perimeter(self) -> float:
        return perimeter(self.points)

    def translated(self, offset) -> "Contour":
        return Contour(self.points + np.asarray(offset, dtype=float))

    def contains(self, xy, strict: bool = True) -> bool:
        poly = shapely.Polygon(self.points)
        pt = shapely.Point(float(xy[0]), float(xy[1]))
        return bool(poly.contains(pt) if strict else poly.covers(pt))


def normalize_contour(points) -> Contour:
    """Validate raw points and return a counter-clockwise simple contour.

    Consecutive duplicates (closer than 1e-9 of the bounding-box diagonal,
    including the closing edge) are merged and clockwise input is reversed.

    Raises
    ------
    EmptyContour
        Fewer than 3 distinct points remain.
    SelfIntersection
        The polygon is not simple.
    """
    pts = np.array(points, dtype=float)
    if pts.ndim != 2 or pts.shape[-1] != 2:
        raise GeometryError(f"contour points must have shape (n, 2), got {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise GeometryError("contour has non-finite coordinates")
    if len(pts) == 0:
        raise EmptyContour("contour has no points")
    diag = float(np.linalg.norm(pts.max(axis=0) - pts.min(axis=0)))
    tol = _MERGE_RTOL * diag
    keep = [pts[0]]
    for p in pts[1:]:
        if np.linalg.norm(p - keep[-1]) >= tol:
            keep.append(p)
    while len(keep) > 1 and np.linalg.norm(keep[-1] - keep[0]) < tol:
        keep.pop()
    pts = np.array(keep)
    if len(pts) < 3:
        raise EmptyContour(f"contour needs at least 3 distinct points, got {len(pts)}")
    if not shapely.LinearRing(pts).is_simple:
        raise SelfIntersection("contour is self-intersecting")
    area = signed_area(pts)
    if area == 0.0:
        raise GeometryError("contour has zero area")
    if area < 0:
        pts = pts[::-1]
    return Contour(pts)


@dataclass(frozen=True)
class ReferencePoint:
    x: float
    y: float

    @property
    def xy(self) -> np.ndarray:
        return np.array([self.x, self.y])


@dataclass(frozen=True)
class ContourFrame:
    """Inner and outer wall contours at one time instant."""

    t: int
    inner: Contour
    outer: Contour

    def __post_init__(self):
        check_nested(self.inner, self.outer)

    def translated(self, offset) -> "ContourFrame":
        return ContourFrame(self.t, self.inner.translated(offset), self.outer.translated(offset))


@dataclass(frozen=True, eq=False)
class BoundaryDisplacementField:
    inner: np.ndarray
    outer: np.ndarray
    frames: tuple[int, int]


def check_nested(inner: Contour, outer: Contour) -> None:
    """Raise :class:`NonNestedContours` unless ``inner`` lies strictly inside ``outer``."""
    outer_poly = shapely.Polygon(outer.points)
    inner_poly = shapely.Polygon(inner.points)
    inside = shapely.contains_xy(outer_poly, inner.points[:, 0], inner.points[:, 1])
    if not np.all(inside) or inner_poly.intersects(outer_poly.exterior):
        raise NonNestedContours("inner contour is not strictly inside the outer contour")


def centroid(contour: Contour) -> ReferencePoint:
    """Arithmetic mean of the contour vertices (not the area centroid)."""
    pts = contour.points
    if len(pts) < 3:
        raise EmptyContour("centroid needs at least 3 points")
    cx, cy = pts.mean(axis=0)
    return ReferencePoint(float(cx), float(cy))


def polar_angles(points: np.ndarray, ref: ReferencePoint) -> np.ndarray:
    """Angles about ``ref`` mapped to ``[0, 2*pi)``."""
    d = np.asarray(points, dtype=float) - ref.xy
    theta = np.mod(np.arctan2(d[..., 1], d[..., 0]), TWO_PI)
    # mod of a tiny negative angle rounds up to exactly 2*pi
    return np.where(theta >= TWO_PI, 0.0, theta)


def order_contour(contour: Contour, ref: ReferencePoint) -> Contour:
    """Renumber points anti-clockwise by polar angle about ``ref``.

    Index 0 is the point with the smallest angle in ``[0, 2*pi)``, i.e. the
    first point at or above the horizontal ray to the right of ``ref``.
    Equal angles are ordered by increasing radius. The input may be an
    unordered point set; ``ref`` must lie strictly inside the polygon the
    angular order produces.
    """
    d = contour.points - ref.xy
    radius = np.hypot(d[:, 0], d[:, 1])
    scale = max(float(radius.max()), 1.0)
    if np.any(radius <= 1e-12 * scale):
        raise DegenerateAngle("a contour point coincides with the reference point")
    theta = polar_angles(contour.points, ref)
    idx = np.lexsort((radius, theta))
    ordered = Contour(contour.points[idx])
    # storage order may be arbitrary, so containment is judged on the ordered polygon
    if not ordered.contains(ref.xy):
        raise RefOutsideContour(f"reference point ({ref.x}, {ref.y}) is not inside the contour")
    return ordered


def resample_contour(contour: Contour, count: int) -> Contour:
    """Place ``count`` points at equal arc-length steps along the closed
    polyline, starting at vertex 0.

    Targets that land on an existing vertex (to 1e-12 of the perimeter)
    reproduce that vertex exactly.
    """
    count = int(count)
    if count < 3:
        raise CountTooSmall(f"resample count must be >= 3, got {count}")
    pts = contour.points
    closed = np.vstack([pts, pts[:1]])
    seg = np.linalg.norm(np.diff(closed, axis=0), axis=1)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    total = cum[-1]
    targets = total * np.arange(count) / count

    out = np.empty((count, 2))
    out[:, 0] = np.interp(targets, cum, closed[:, 0])
    out[:, 1] = np.interp(targets, cum, closed[:, 1])

    j = np.clip(np.searchsorted(cum, targets), 0, len(cum) - 1)
    jm = np.clip(j - 1, 0, len(cum) - 1)
    near = np.where(np.abs(cum[j] - targets) <= np.abs(cum[jm] - targets), j, jm)
    snap = np.abs(cum[near] - targets) <= 1e-12 * total
    out[snap] = closed[near[snap]]
    return Contour(out)


def prepare_frame(frame: ContourFrame, ref: ReferencePoint, count: int | None) -> ContourFrame:
    """Order both contours about ``ref`` and resample them to ``count`` points.

    With ``count=None`` the ordered points are kept as they are.
    """
    inner = order_contour(frame.inner, ref)
    outer = order_contour(frame.outer, ref)
    if count is not None:
        inner, outer = resample_contour(inner, count), resample_contour(outer, count)
    return ContourFrame(frame.t, inner, outer)


def prepare_pair(frame0: ContourFrame, frame1: ContourFrame, count: int | None = DEFAULT_POINTS):
    """Shared reference point (from ``frame0.inner``) and index-matched frames.

    ``count=None`` skips resampling, so correspondence is by angular rank
    alone and the frames must already carry equal point counts.

    Returns
    -------
    ref, prepared0, prepared1
    """
    ref = centroid(frame0.inner)
    return ref, prepare_frame(frame0, ref, count), prepare_frame(frame1, ref, count)


def compute_boundary_displacements(frame0: ContourFrame, frame1: ContourFrame,
                                   ref: ReferencePoint | None = None) -> BoundaryDisplacementField:
    """Point-wise displacement ``X(t1) - X(t0)`` for index-matched frames.

    Pass ``ref`` to order both frames about it first (a no-op for frames
    already prepared against the same point). Without it the stored point
    order is taken as the correspondence.
    """
    if ref is not None:
        frame0, frame1 = prepare_frame(frame0, ref, None), prepare_frame(frame1, ref, None)
    if len(frame0.inner) != len(frame1.inner):
        raise CountMismatch(f"inner contours have {len(frame0.inner)} and {len(frame1.inner)} points")
    if len(frame0.outer) != len(frame1.outer):
        raise CountMismatch(f"outer contours have {len(frame0.outer)} and {len(frame1.outer)} points")
    return BoundaryDisplacementField(
        inner=frame1.inner.points - frame0.inner.points,
        outer=frame1.outer.points - frame0.outer.points,
        frames=(frame0.t, frame1.t),
    )
