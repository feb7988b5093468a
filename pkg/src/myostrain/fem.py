"""Plane-stress linear elasticity on constant-strain triangles.

Degrees of freedom are interleaved ``[u0, v0, u1, v1, ...]``. Dirichlet
data are imposed by symmetric elimination, so the reduced stiffness stays
symmetric positive definite and prescribed values come back unchanged.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import (
    ConflictingBC,
    DegenerateElement,
    EdgeNotOnBoundary,
    InvalidMaterial,
    InvalidPoisson,
    NoConvergence,
    NotPositiveDefinite,
    SingularConstraint,
    UnknownMaterial,
)
from .mesh import Mesh, triangle_areas

DEFAULT_TOL = 1e-10
AREA_RTOL = 1e-12


@dataclass(frozen=True)
class MaterialParams:
    young_modulus: float
    poisson_ratio: float
    thickness: float = 1.0

    def __post_init__(self):
        if not self.young_modulus > 0:
            raise InvalidMaterial(f"Young's modulus must be positive, got {self.young_modulus}")
        if not 0.0 <= self.poisson_ratio < 0.5:
            raise InvalidPoisson(f"Poisson ratio must lie in [0, 0.5), got {self.poisson_ratio}")
        if not self.thickness > 0:
            raise InvalidMaterial(f"thickness must be positive, got {self.thickness}")


def constitutive_matrix(m: MaterialParams) -> np.ndarray:
    """Plane-stress D mapping (eps_x, eps_y, gamma_xy) to (sig_x, sig_y, tau_xy)."""
    E, nu = m.young_modulus, m.poisson_ratio
    if not 0.0 <= nu < 0.5:
        raise InvalidPoisson(f"Poisson ratio must lie in [0, 0.5), got {nu}")
    c = E / (1.0 - nu * nu)
    return c * np.array([[1.0, nu, 0.0], [nu, 1.0, 0.0], [0.0, 0.0, (1.0 - nu) / 2.0]])


def strain_displacement(coords: np.ndarray, area_tol: float = 0.0):
    """Areas and B matrices of linear triangles.

    Parameters
    ----------
    coords : (m, 3, 2) or (3, 2) array
    area_tol : float
        Elements with area at or below this raise :class:`DegenerateElement`.

    Returns
    -------
    area : (m,) array
    B : (m, 3, 6) array
        Rows give eps_x, eps_y, gamma_xy from interleaved nodal (u, v).
    """
    c = np.asarray(coords, dtype=float)
    single = c.ndim == 2
    if single:
        c = c[None]
    area = triangle_areas(c)
    if np.any(area <= area_tol):
        bad = int(np.flatnonzero(area <= area_tol)[0])
        raise DegenerateElement(f"element {bad} has area {area[bad]:.3e} <= {area_tol:.3e}")
    x, y = c[..., 0], c[..., 1]
    # dN_i/dx = (y_j - y_k) / 2A, dN_i/dy = (x_k - x_j) / 2A with (i, j, k) cyclic
    b = np.roll(y, -1, axis=1) - np.roll(y, -2, axis=1)
    g = np.roll(x, -2, axis=1) - np.roll(x, -1, axis=1)
    dndx = b / (2 * area[:, None])
    dndy = g / (2 * area[:, None])
    B = np.zeros((len(c), 3, 6))
    B[:, 0, 0::2] = dndx
    B[:, 1, 1::2] = dndy
    B[:, 2, 0::2] = dndy
    B[:, 2, 1::2] = dndx
    return area, B


def _element_tol(coords: np.ndarray) -> float:
    c = np.asarray(coords).reshape(-1, 2)
    ext = c.max(axis=0) - c.min(axis=0)
    return AREA_RTOL * float(ext[0] * ext[1])


def element_stiffness(coords, D: np.ndarray, thickness: float = 1.0, area_tol: float | None = None) -> np.ndarray:
    """6x6 stiffness ``A t B^T D B`` of one constant-strain triangle."""
    coords = np.asarray(coords, dtype=float)
    if area_tol is None:
        area_tol = _element_tol(coords)
    area, B = strain_displacement(coords, area_tol)
    ke = area[0] * thickness * B[0].T @ D @ B[0]
    return 0.5 * (ke + ke.T)


def element_stiffnesses(mesh: Mesh, materials) -> np.ndarray:
    """(m, 6, 6) stiffness matrices for every element of ``mesh``."""
    table = _material_table(materials)
    ids = np.unique(mesh.material)
    missing = [int(i) for i in ids if int(i) not in table]
    if missing:
        raise UnknownMaterial(f"material ids {missing} not in material table")
    Ds = {i: constitutive_matrix(m) for i, m in table.items()}
    D = np.stack([Ds[int(i)] for i in mesh.material]) if mesh.n_elements else np.zeros((0, 3, 3))
    t = np.array([table[int(i)].thickness for i in mesh.material])
    area, B = strain_displacement(mesh.element_coords(), AREA_RTOL * mesh.bounding_box_area())
    ke = np.einsum("e,eji,ejk,ekl->eil", area * t, B, D, B)
    return 0.5 * (ke + ke.transpose(0, 2, 1))


def _material_table(materials) -> dict[int, MaterialParams]:
    if isinstance(materials, MaterialParams):
        return {0: materials}
    if isinstance(materials, Mapping):
        return {int(k): v for k, v in materials.items()}
    return dict(enumerate(materials))


def element_dofs(elements: np.ndarray) -> np.ndarray:
    """(m, 6) interleaved global DOF indices."""
    e = np.asarray(elements)
    dofs = np.empty((len(e), 6), dtype=np.int64)
    dofs[:, 0::2] = 2 * e
    dofs[:, 1::2] = 2 * e + 1
    return dofs


@dataclass(frozen=True, eq=False)
class LinearSystem:
    """Global stiffness ``K``, load ``F`` and the prescribed DOF values.

    Dirichlet data are recorded, not baked into ``K``; elimination happens in
    :meth:`reduced` so loads and constraints can be added in any order.
    """

    K: sp.csr_matrix
    F: np.ndarray
    mesh: Mesh
    materials: dict = field(default_factory=dict)
    prescribed: dict = field(default_factory=dict)

    @property
    def n_dofs(self) -> int:
        return self.K.shape[0]

    def split(self):
        fixed = np.array(sorted(self.prescribed), dtype=np.int64)
        free = np.setdiff1d(np.arange(self.n_dofs), fixed)
        values = np.array([self.prescribed[d] for d in fixed], dtype=float)
        return free, fixed, values

    def reduced(self):
        """Free DOFs, the free-free block and the load adjusted for prescribed values."""
        free, fixed, values = self.split()
        K_ff = self.K[free][:, free].tocsc()
        rhs = self.F[free].copy()
        if len(fixed):
            rhs -= self.K[free][:, fixed] @ values
        return free, K_ff, rhs


def assemble_global(mesh: Mesh, materials) -> LinearSystem:
    """Scatter all element stiffnesses into a sparse global matrix.

    Contributions are summed in element order, so the result is
    reproducible bit for bit and exactly symmetric.
    """
    table = _material_table(materials)
    ke = element_stiffnesses(mesh, table)
    dofs = element_dofs(mesh.elements)
    rows = np.repeat(dofs, 6, axis=1).ravel()
    cols = np.tile(dofs, (1, 6)).ravel()
    n = 2 * mesh.n_nodes
    # explicit (row, col, element) ordering: K[i, j] and K[j, i] add the same
    # values in the same order, so symmetry is exact
    key = rows * n + cols
    order = np.lexsort((np.repeat(np.arange(mesh.n_elements), 36), key))
    key, vals = key[order], ke.ravel()[order]
    starts = np.flatnonzero(np.r_[True, key[1:] != key[:-1]])
    data = np.add.reduceat(vals, starts) if len(vals) else vals
    ukey = key[starts]
    K = sp.csr_matrix((data, (ukey // n, ukey % n)), shape=(n, n))
    K.sort_indices()
    return LinearSystem(K, np.zeros(n), mesh, table)


@dataclass(frozen=True)
class DirichletBC:
    """Prescribed displacement ``h @ u = r`` at one node.

    ``h`` defaults to the identity. A diagonal 0/1 selector constrains only
    the components with a 1; any other ``h`` is rejected.
    """

    node: int
    value: tuple[float, float]
    h: tuple | None = None

    def components(self) -> tuple[int, ...]:
        if self.h is None:
            return (0, 1)
        h = np.asarray(self.h, dtype=float)
        if h.shape != (2, 2):
            raise SingularConstraint(f"h must be 2x2, got shape {h.shape}")
        if np.array_equal(h, np.eye(2)):
            return (0, 1)
        if h[0, 1] == 0 and h[1, 0] == 0 and set(np.diag(h)) <= {0.0, 1.0}:
            comps = tuple(int(c) for c in np.flatnonzero(np.diag(h)))
            if not comps:
                raise SingularConstraint(f"node {self.node}: h is zero")
            return comps
        raise SingularConstraint(f"node {self.node}: only identity or diagonal 0/1 selector h is supported")


def apply_dirichlet(system: LinearSystem, bcs: Sequence[DirichletBC]) -> LinearSystem:
    """Record prescribed displacements; returns a new system."""
    prescribed = dict(system.prescribed)
    n_nodes = system.n_dofs // 2
    for bc in bcs:
        if not 0 <= bc.node < n_nodes:
            raise IndexError(f"node {bc.node} out of range")
        value = np.asarray(bc.value, dtype=float)
        if not np.all(np.isfinite(value)):
            raise ValueError(f"node {bc.node}: non-finite prescribed value")
        for c in bc.components():
            dof = 2 * bc.node + c
            v = float(value[c])
            if dof in prescribed and prescribed[dof] != v:
                raise ConflictingBC(f"DOF {dof} prescribed as {prescribed[dof]} and {v}")
            prescribed[dof] = v
    return replace(system, prescribed=prescribed)


def dirichlet_from_nodes(nodes, values) -> list[DirichletBC]:
    values = np.asarray(values, dtype=float)
    return [DirichletBC(int(n), (values[i, 0], values[i, 1])) for i, n in enumerate(nodes)]


@dataclass(frozen=True)
class TractionBC:
    """Constant traction ``g`` (force per area) on boundary edge ``(n0, n1)``."""

    edge: tuple[int, int]
    g: tuple[float, float]
    q: tuple | None = None


def apply_traction(system: LinearSystem, bcs: Sequence[TractionBC]) -> LinearSystem:
    """Add consistent nodal loads ``t * g * length / 2`` to both edge ends."""
    mesh = system.mesh
    bedges = mesh.boundary_edges()
    owner = _edge_owner(mesh)
    boundary_keys = {tuple(sorted(map(int, e))) for e in bedges}
    F = system.F.copy()
    for bc in bcs:
        if bc.q is not None and np.any(np.asarray(bc.q, dtype=float) != 0):
            raise ValueError("only q = 0 (pure traction) is supported")
        n0, n1 = int(bc.edge[0]), int(bc.edge[1])
        key = (min(n0, n1), max(n0, n1))
        if key not in boundary_keys:
            raise EdgeNotOnBoundary(f"edge {bc.edge} is not a boundary edge")
        t = system.materials[int(mesh.material[owner[key]])].thickness
        length = float(np.linalg.norm(mesh.nodes[n1] - mesh.nodes[n0]))
        load = t * np.asarray(bc.g, dtype=float) * length / 2.0
        F[2 * n0: 2 * n0 + 2] += load
        F[2 * n1: 2 * n1 + 2] += load
    return replace(system, F=F)


def _edge_owner(mesh: Mesh) -> dict:
    owner = {}
    for e, tri in enumerate(mesh.elements):
        for a, b in ((0, 1), (1, 2), (2, 0)):
            key = (min(int(tri[a]), int(tri[b])), max(int(tri[a]), int(tri[b])))
            owner.setdefault(key, e)
    return owner


def outward_normals(mesh: Mesh, edges: np.ndarray) -> np.ndarray:
    """Unit outward normals of boundary edges oriented as in their
    (counter-clockwise) owning element."""
    d = mesh.nodes[edges[:, 1]] - mesh.nodes[edges[:, 0]]
    n = np.stack([d[:, 1], -d[:, 0]], axis=1)
    return n / np.linalg.norm(n, axis=1, keepdims=True)


def pressure_tractions(mesh: Mesh, boundary_kind: int, pressure: float) -> list[TractionBC]:
    """Uniform pressure on one boundary: traction ``-p n`` pushes into the wall."""
    edges = mesh.boundary_edges()
    on = np.isin(edges, mesh.boundary_nodes(boundary_kind)).all(axis=1)
    edges = edges[on]
    normals = outward_normals(mesh, edges)
    return [TractionBC((int(e[0]), int(e[1])), tuple(-pressure * n)) for e, n in zip(edges, normals)]


@dataclass(frozen=True, eq=False)
class DisplacementSolution:
    """Nodal displacements ``u[:, 0]`` (x) and ``u[:, 1]`` (y)."""

    u: np.ndarray
    residual: float
    method: str
    iterations: int = 0

    @property
    def flat(self) -> np.ndarray:
        return self.u.ravel()


def solve_system(system: LinearSystem, tol: float = DEFAULT_TOL, method: str = "direct",
                 maxiter: int | None = None) -> DisplacementSolution:
    """Solve the reduced SPD system and reinsert prescribed values.

    Parameters
    ----------
    method : {"direct", "cg"}
        Sparse LU with symmetric pivoting, or Jacobi-preconditioned CG.
    tol : float
        Required relative residual ``||K_ff u_f - rhs|| / ||rhs||``.

    Raises
    ------
    NotPositiveDefinite
        A non-positive or vanishing pivot (e.g. unconstrained rigid modes).
    NoConvergence
        CG hit ``maxiter`` or the final residual exceeds ``tol``.
    """
    free, K_ff, rhs = system.reduced()
    x = np.zeros(system.n_dofs)
    _, fixed, values = system.split()
    x[fixed] = values
    iterations = 0
    rnorm = float(np.linalg.norm(rhs))
    if len(free) == 0 or rnorm == 0.0:
        if len(free):
            _check_spd(K_ff)
        return DisplacementSolution(x.reshape(-1, 2), 0.0, method)

    if method == "direct":
        uf = _check_spd(K_ff).solve(rhs)
    elif method == "cg":
        diag = K_ff.diagonal()
        if np.any(diag <= 0):
            raise NotPositiveDefinite("non-positive diagonal entry in reduced stiffness")
        precond = spla.LinearOperator(K_ff.shape, matvec=lambda r: r / diag)
        count = [0]

        def _tick(_):
            count[0] += 1

        uf, info = spla.cg(K_ff, rhs, rtol=tol, atol=0.0, M=precond,
                           maxiter=maxiter or 10 * len(free), callback=_tick)
        iterations = count[0]
        if info > 0:
            raise NoConvergence(f"CG stopped after {info} iterations")
        if info < 0:
            raise NotPositiveDefinite("CG breakdown")
    else:
        raise ValueError(f"unknown solver method {method!r}")

    residual = float(np.linalg.norm(K_ff @ uf - rhs)) / rnorm
    if not np.all(np.isfinite(uf)):
        raise NotPositiveDefinite("solution is not finite")
    if residual > tol:
        raise NoConvergence(f"relative residual {residual:.3e} exceeds tolerance {tol:.1e}")
    x[free] = uf
    return DisplacementSolution(x.reshape(-1, 2), residual, method, iterations)


def _check_spd(K_ff: sp.csc_matrix):
    """Factor with diagonal pivoting; all pivots must be clearly positive."""
    try:
        lu = spla.splu(K_ff, permc_spec="MMD_AT_PLUS_A", diag_pivot_thresh=0.0,
                       options={"SymmetricMode": True})
    except RuntimeError as exc:
        raise NotPositiveDefinite(str(exc)) from None
    piv = lu.U.diagonal()
    scale = float(np.abs(K_ff.diagonal()).max())
    if np.any(piv <= 1e-13 * scale):
        raise NotPositiveDefinite("reduced stiffness is singular or indefinite (unconstrained rigid modes?)")
    return lu


def solve_dirichlet(mesh: Mesh, materials, nodes, values, tol: float = DEFAULT_TOL,
                    method: str = "direct") -> DisplacementSolution:
    """Displacement field driven purely by prescribed nodal displacements."""
    system = apply_dirichlet(assemble_global(mesh, materials), dirichlet_from_nodes(nodes, values))
    return solve_system(system, tol=tol, method=method)
