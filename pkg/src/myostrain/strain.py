"""Small-strain components, radial projection and angular sector statistics."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .contours import ReferencePoint, polar_angles
from .errors import NodeAtReference
from .fem import AREA_RTOL, element_dofs, strain_displacement
from .mesh import Mesh

DEFAULT_SECTORS = 16
STRAIN_COMPONENTS = ("eps_x", "eps_y", "gamma_xy")


def element_strain(coords, u_nodes) -> np.ndarray:
    """(eps_x, eps_y, gamma_xy) of one linear triangle.

    Parameters
    ----------
    coords : (3, 2) array
    u_nodes : (3, 2) array
        Nodal (u, v) displacements.
    """
    coords = np.asarray(coords, dtype=float)
    ext = coords.max(axis=0) - coords.min(axis=0)
    _, B = strain_displacement(coords, AREA_RTOL * float(ext[0] * ext[1]))
    return B[0] @ np.asarray(u_nodes, dtype=float).ravel()


def element_strains(mesh: Mesh, u: np.ndarray) -> np.ndarray:
    """(m, 3) constant strain per element for nodal displacements ``u`` (n, 2)."""
    _, B = strain_displacement(mesh.element_coords(), AREA_RTOL * mesh.bounding_box_area())
    ue = np.asarray(u, dtype=float).ravel()[element_dofs(mesh.elements)]
    return np.einsum("eij,ej->ei", B, ue)


def nodal_strain_average(mesh: Mesh, strains: np.ndarray) -> np.ndarray:
    """Area-weighted mean of the element strains around each node.

    Nodes not used by any element get NaN.
    """
    strains = np.asarray(strains, dtype=float)
    area = mesh.element_areas()
    acc = np.zeros((mesh.n_nodes,) + strains.shape[1:])
    wsum = np.zeros(mesh.n_nodes)
    for k in range(3):
        np.add.at(acc, mesh.elements[:, k], area[:, None] * strains if strains.ndim > 1 else area * strains)
        np.add.at(wsum, mesh.elements[:, k], area)
    with np.errstate(invalid="ignore", divide="ignore"):
        return acc / (wsum[:, None] if strains.ndim > 1 else wsum)


def radial_displacement(u: np.ndarray, positions: np.ndarray, ref: ReferencePoint) -> np.ndarray:
    """Projection of each displacement onto the unit ray from ``ref``."""
    d = np.asarray(positions, dtype=float) - ref.xy
    r = np.hypot(d[:, 0], d[:, 1])
    scale = max(float(r.max()), 1.0) if len(r) else 1.0
    if np.any(r <= 1e-12 * scale):
        raise NodeAtReference("a node coincides with the reference point")
    return np.einsum("ij,ij->i", np.asarray(u, dtype=float), d) / r


def sector_index(positions: np.ndarray, ref: ReferencePoint, n_sectors: int = DEFAULT_SECTORS) -> np.ndarray:
    """1-based sector numbers; sector s spans ``[(s-1)*w, s*w)`` degrees,
    counted anti-clockwise from the +x ray through ``ref``."""
    if n_sectors < 1:
        raise ValueError(f"n_sectors must be >= 1, got {n_sectors}")
    theta = polar_angles(positions, ref)
    idx = np.floor(theta * n_sectors / (2 * np.pi)).astype(np.int64)
    return np.minimum(idx, n_sectors - 1) + 1


@dataclass(frozen=True, eq=False)
class SectorReport:
    """Per-sector means; ``means[s - 1]`` is sector ``s`` and is NaN when empty."""

    n_sectors: int
    means: np.ndarray
    counts: np.ndarray
    weights: np.ndarray

    @property
    def width(self) -> float:
        return 360.0 / self.n_sectors

    @property
    def empty(self) -> np.ndarray:
        return self.counts == 0


def sector_aggregate(values, positions, ref: ReferencePoint, n_sectors: int = DEFAULT_SECTORS,
                     weights=None) -> SectorReport:
    """Bin entries by angle about ``ref`` and average within each sector.

    ``values`` may be scalars ``(k,)`` or vectors ``(k, c)``; ``weights``
    (e.g. element areas) turn the mean into a weighted mean.
    """
    values = np.asarray(values, dtype=float)
    sec = sector_index(positions, ref, n_sectors) - 1
    w = np.ones(len(values)) if weights is None else np.asarray(weights, dtype=float)
    counts = np.bincount(sec, minlength=n_sectors)
    wsum = np.bincount(sec, weights=w, minlength=n_sectors)
    flat = values.reshape(len(values), -1)
    sums = np.stack([np.bincount(sec, weights=w * flat[:, j], minlength=n_sectors)
                     for j in range(flat.shape[1])], axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        means = sums / wsum[:, None]
    means[counts == 0] = np.nan
    means = means.reshape((n_sectors,) + values.shape[1:])
    return SectorReport(n_sectors, means, counts, wsum)


def element_sector_report(mesh: Mesh, strains: np.ndarray, ref: ReferencePoint,
                          n_sectors: int = DEFAULT_SECTORS) -> SectorReport:
    """Area-weighted sector means of element strains, binned by element centroid."""
    return sector_aggregate(strains, mesh.element_centroids(), ref, n_sectors, weights=mesh.element_areas())
