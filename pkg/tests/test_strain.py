import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from myostrain.contours import Contour, ReferencePoint
from myostrain.errors import NodeAtReference
from myostrain.mesh import Mesh, build_annular_mesh
from myostrain.strain import (
    element_sector_report,
    element_strain,
    element_strains,
    nodal_strain_average,
    radial_displacement,
    sector_aggregate,
    sector_index,
)

from conftest import circle, star_contour

TRI = np.array([[0.2, 0.1], [1.3, 0.4], [0.5, 1.2]])
ORIGIN = ReferencePoint(0.0, 0.0)


@pytest.mark.parametrize("field, expected", [
    (lambda x, y: (x, 0 * x), (1, 0, 0)),
    (lambda x, y: (y, x), (0, 0, 2)),
    (lambda x, y: (-y, x), (0, 0, 0)),
])
def test_element_strain_examples(field, expected):
    u = np.column_stack(field(TRI[:, 0], TRI[:, 1]))
    np.testing.assert_allclose(element_strain(TRI, u), expected, atol=1e-14)


def test_element_strain_matches_finite_difference():
    # independent check: gradient of the linear interpolant by central differences
    rng = np.random.default_rng(2)
    u = rng.normal(size=(3, 2))
    A = np.column_stack([np.ones(3), TRI])

    def interp(p):
        lam = np.linalg.solve(A.T, np.array([1.0, *p]))
        return lam @ u

    c, h = TRI.mean(axis=0), 1e-6
    dudx = (interp(c + [h, 0]) - interp(c - [h, 0])) / (2 * h)
    dudy = (interp(c + [0, h]) - interp(c - [0, h])) / (2 * h)
    expected = [dudx[0], dudy[1], dudy[0] + dudx[1]]
    np.testing.assert_allclose(element_strain(TRI, u), expected, rtol=1e-7, atol=1e-9)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.lists(st.floats(-1, 1), min_size=6, max_size=6))
def test_affine_field_gives_constant_exact_strain(seed, c):
    rng = np.random.default_rng(seed)
    inner = star_contour(rng, 16, 1.0, amp=0.1)
    mesh = build_annular_mesh(inner, Contour(inner.points * 2.0), 3)
    x, y = mesh.nodes[:, 0], mesh.nodes[:, 1]
    u = np.column_stack([c[0] + c[1] * x + c[2] * y, c[3] + c[4] * x + c[5] * y])
    s = element_strains(mesh, u)
    expected = np.array([c[1], c[5], c[2] + c[4]])
    assert np.abs(s - expected).max() <= 1e-10 * max(1.0, np.abs(c).max())


def test_rigid_motions_strain_free():
    mesh = build_annular_mesh(Contour(circle(24, 3.0)), Contour(circle(24, 5.0)), 3)
    x, y = mesh.nodes[:, 0], mesh.nodes[:, 1]
    trans = np.tile([0.7, -0.2], (mesh.n_nodes, 1))
    assert np.abs(element_strains(mesh, trans)).max() <= 1e-12
    theta = 1e-3
    rot = theta * np.column_stack([-y, x])
    assert np.abs(element_strains(mesh, rot)).max() <= 1e-12 * theta


def test_nodal_average():
    mesh = Mesh.from_arrays([[0, 0], [1, 0], [0, 1]], [[0, 1, 2]])
    s = np.array([[0.1, 0.2, 0.3]])
    np.testing.assert_allclose(nodal_strain_average(mesh, s), np.repeat(s, 3, axis=0))
    # node 0 shared by triangles of area 1 and 3
    two = Mesh.from_arrays([[0, 0], [1, 0], [0, 2], [-3, 0], [0, -2]], [[0, 1, 2], [0, 3, 4]])
    assert list(two.element_areas()) == [1.0, 3.0]
    avg = nodal_strain_average(two, np.array([[0.0, 0, 0], [4.0, 0, 0]]))
    assert avg[0, 0] == pytest.approx(3.0)
    ring = build_annular_mesh(Contour(circle(12, 1.0)), Contour(circle(12, 2.0)), 2)
    const = np.tile([0.01, -0.02, 0.005], (ring.n_elements, 1))
    np.testing.assert_allclose(nodal_strain_average(ring, const), np.tile(const[0], (ring.n_nodes, 1)), rtol=1e-13)


@pytest.mark.parametrize("node, u, expected", [
    ((1, 0), (0.1, 0), 0.1),
    ((1, 0), (0, 0.1), 0.0),
    ((0, 2), (0.3, -0.5), -0.5),
])
def test_radial_displacement(node, u, expected):
    assert radial_displacement(np.array([u]), np.array([node]), ORIGIN)[0] == pytest.approx(expected)


def test_radial_displacement_node_at_reference():
    with pytest.raises(NodeAtReference):
        radial_displacement(np.zeros((2, 2)), np.array([[1.0, 0.0], [0.0, 0.0]]), ORIGIN)


def _at(deg, r=1.0):
    return np.array([[r * np.cos(np.radians(deg)), r * np.sin(np.radians(deg))]])


def test_sector_index_examples():
    assert sector_index(_at(10), ORIGIN, 16)[0] == 1
    assert sector_index(_at(350), ORIGIN, 16)[0] == 16
    assert sector_index(_at(0), ORIGIN, 16)[0] == 1
    assert sector_index(_at(22.5 + 1e-9), ORIGIN, 16)[0] == 2


def test_sector_aggregate_uniform_and_empty():
    pos = circle(64, 2.0, phase=0.5)
    rep = sector_aggregate(np.full(64, 3.5), pos, ORIGIN, 16)
    np.testing.assert_allclose(rep.means, 3.5)
    assert rep.width == 22.5
    sparse = sector_aggregate(np.ones(2), np.vstack([_at(10), _at(100)]), ORIGIN, 16)
    assert np.isnan(sparse.means[1]) and sparse.means[0] == 1.0
    assert sparse.empty.sum() == 14


def test_sector_aggregate_conservation_and_global_mean():
    rng = np.random.default_rng(5)
    pos = rng.normal(size=(500, 2))
    vals = rng.normal(size=500)
    rep = sector_aggregate(vals, pos, ORIGIN, 16)
    total = np.nansum(rep.counts * rep.means)
    assert total == pytest.approx(vals.sum(), rel=1e-12, abs=1e-12)
    one = sector_aggregate(vals, pos, ORIGIN, 1)
    assert one.means[0] == pytest.approx(vals.mean(), rel=1e-12)
    w = rng.uniform(0.5, 2.0, 500)
    rep_w = sector_aggregate(vals, pos, ORIGIN, 16, weights=w)
    assert np.nansum(rep_w.weights * rep_w.means) == pytest.approx(np.sum(w * vals), rel=1e-12)


def test_element_sector_report_tensor():
    mesh = build_annular_mesh(Contour(circle(32, 1.0)), Contour(circle(32, 2.0)), 2)
    s = np.tile([0.01, 0.02, -0.003], (mesh.n_elements, 1))
    rep = element_sector_report(mesh, s, ORIGIN)
    assert rep.means.shape == (16, 3)
    np.testing.assert_allclose(rep.means, np.tile(s[0], (16, 1)), rtol=1e-13)
