import numpy as np
import pytest

from myostrain.errors import InhomogeneousSpec, LengthMismatch, RadiusOutOfRange, ZeroVariance
from myostrain.mesh import INNER_BOUNDARY
from myostrain.ring import (
    RingSpec,
    generate_ring_mesh,
    interpolate_nodal,
    lame_error,
    lame_reference,
    pearson_correlation,
    reference_pressure_solve,
    remove_rigid_motion,
    run_benchmark,
    sector_correlations,
    with_pressure,
)
from myostrain.strain import radial_displacement

UNIT_RING = RingSpec(e1=1.0, nu1=0.0, abnormal_span=0.0)


def test_ring_mesh_counts_and_tags():
    mesh = generate_ring_mesh(RingSpec(), 16, 2)
    assert (mesh.n_nodes, mesh.n_elements) == (48, 64)
    assert not generate_ring_mesh(RingSpec(abnormal_span=0), 16, 2).material.any()
    for phase in (0.0, 0.5):
        tagged = generate_ring_mesh(RingSpec(), 16, 2, phase=phase)
        frac = tagged.material.mean()
        assert abs(frac - 1 / 8) <= 2 / 64 + 1e-12


def test_lame_values():
    # u_r = p a^2 / (E (b^2 - a^2)) ((1 - nu) r + (1 + nu) b^2 / r)
    assert lame_reference(1.0, UNIT_RING) == pytest.approx(5 / 3)
    assert lame_reference(2.0, UNIT_RING) == pytest.approx(4 / 3)
    assert lame_reference(1.5, RingSpec(pressure=0.0, abnormal_span=0)) == 0.0
    with pytest.raises(RadiusOutOfRange):
        lame_reference(2.5, UNIT_RING)
    with pytest.raises(InhomogeneousSpec):
        lame_reference(1.5, RingSpec())


def test_lame_satisfies_boundary_tractions():
    # independent check of the closed form: sigma_r(a) = -p, sigma_r(b) = 0 by finite differences
    spec = RingSpec(e1=200.0, nu1=0.3, pressure=2.0, abnormal_span=0)
    E, nu, h = spec.e1, spec.nu1, 1e-6

    def sigma_r(r):
        dudr = (lame_reference(min(r + h, 2.0), spec) - lame_reference(max(r - h, 1.0), spec)) / (min(r + h, 2.0) - max(r - h, 1.0))
        return E / (1 - nu**2) * (dudr + nu * lame_reference(r, spec) / r)

    assert sigma_r(1.0) == pytest.approx(-2.0, rel=1e-5)
    assert sigma_r(2.0) == pytest.approx(0.0, abs=1e-5)


def test_reference_solve_matches_lame():
    spec = RingSpec(abnormal_span=0)
    err = lame_error(spec, 256, 16)
    assert err < 5e-3


def test_reference_solve_axisymmetric_and_linear():
    spec = RingSpec(abnormal_span=0)
    rs = reference_pressure_solve(spec, 64, 4)
    ur = radial_displacement(rs.u, rs.mesh.nodes, spec.ref).reshape(5, 64)
    assert np.all(ur.std(axis=1) < 1e-6 * ur.mean(axis=1))
    rs2 = reference_pressure_solve(with_pressure(spec, 2.0), 64, 4)
    np.testing.assert_allclose(rs2.u, 2 * rs.u, rtol=1e-9, atol=1e-9 * np.abs(rs.u).max())


def test_reference_solve_pin_independent():
    spec = RingSpec()
    rs = reference_pressure_solve(spec, 64, 4)
    # no residual rigid motion left
    np.testing.assert_allclose(remove_rigid_motion(rs.mesh.nodes, rs.u), rs.u, atol=1e-12 * np.abs(rs.u).max())
    # deformed inner contour is the initial one plus the boundary displacement
    inner = rs.mesh.boundary_nodes(INNER_BOUNDARY)
    np.testing.assert_array_equal(rs.frame1.inner.points, rs.frame0.inner.points + rs.u[inner])


def test_pearson_examples():
    assert pearson_correlation([1, 2, 3], [2, 4, 6]) == pytest.approx(1.0)
    assert pearson_correlation([1, 2, 3], [3, 2, 1]) == pytest.approx(-1.0)
    assert pearson_correlation([1, 2, 3, 4], [1, 3, 2, 4]) == pytest.approx(0.8)
    with pytest.raises(ZeroVariance):
        pearson_correlation([1, 1, 1], [1, 2, 3])
    with pytest.raises(LengthMismatch):
        pearson_correlation([1, 2], [1, 2, 3])


def test_pearson_invariant_under_positive_affine():
    rng = np.random.default_rng(0)
    x, y = rng.normal(size=30), rng.normal(size=30)
    assert pearson_correlation(x, 3 * y + 7) == pytest.approx(pearson_correlation(x, y), abs=1e-14)


def test_interpolate_nodal_linear_exact():
    mesh = generate_ring_mesh(RingSpec(), 32, 4)
    f = lambda p: 2 * p[:, 0] - 0.5 * p[:, 1] + 1
    rng = np.random.default_rng(1)
    r = rng.uniform(1.1, 1.9, 100)
    th = rng.uniform(0, 2 * np.pi, 100)
    pts = np.column_stack([r * np.cos(th), r * np.sin(th)])
    np.testing.assert_allclose(interpolate_nodal(mesh, f(mesh.nodes), pts), f(pts), atol=1e-12)
    with pytest.raises(ValueError):
        interpolate_nodal(mesh, f(mesh.nodes), np.array([[0.0, 0.0]]))


def test_self_correlation_is_one():
    res = run_benchmark(RingSpec(), coarse=(32, 4), fine=(64, 8))
    self_corr = sector_correlations(res.radial_reference, res.radial_reference, res.pair.mesh.nodes, res.pair.ref)
    np.testing.assert_allclose(self_corr, 1.0, atol=1e-15)


def test_homogeneous_identity_discretization():
    res = run_benchmark(RingSpec(abnormal_span=0), coarse=(64, 8), fine=(64, 8))
    assert res.correlations.min() >= 0.999
    assert res.l2_discrepancy < 1e-9


def test_benchmark_translation_invariant():
    a = run_benchmark(RingSpec(), coarse=(32, 4), fine=(128, 8))
    b = run_benchmark(RingSpec(center=(12.5, -4.0)), coarse=(32, 4), fine=(128, 8))
    np.testing.assert_allclose(a.correlations, b.correlations, atol=1e-9)
    assert np.all(np.abs(a.correlations) <= 1)


def test_benchmark_requires_divisible_points():
    with pytest.raises(ValueError):
        run_benchmark(RingSpec(), coarse=(48, 4), fine=(64, 8))
