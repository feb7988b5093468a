import json

import numpy as np
import pytest

from myostrain.cli import main
from myostrain.contours import ContourFrame
from myostrain.errors import GeometryError, ParseError, SchemaViolation
from myostrain.fem import MaterialParams
from myostrain.pipeline import (
    ContourDocument,
    PipelineConfig,
    document_from_dict,
    document_to_dict,
    load_contours,
    run_deformation_pipeline,
    save_contours,
    write_outputs,
)
from myostrain.synthetic import synthetic_cycle, transformed_copy

from conftest import circle


def minimal_doc():
    inner = circle(16, 10.0, center=(50, 50), phase=0.2).tolist()
    outer = circle(16, 18.0, center=(50, 50), phase=0.2).tolist()
    return {"subject": "S1", "slice": 2, "frames": [
        {"t": 0, "inner": inner, "outer": outer},
        {"t": 1, "inner": inner, "outer": outer},
    ]}


@pytest.fixture
def doc_path(tmp_path):
    p = tmp_path / "doc.json"
    p.write_text(json.dumps(minimal_doc()))
    return p


def test_load_minimal(doc_path):
    doc = load_contours(doc_path)
    assert len(doc.frames) == 2
    assert doc.subject == "S1" and doc.slice == 2
    assert all(f.inner.orientation == "counter_clockwise" for f in doc.frames)


def test_load_normalizes_clockwise(tmp_path):
    d = minimal_doc()
    d["frames"][0]["outer"] = d["frames"][0]["outer"][::-1]
    doc = document_from_dict(d)
    assert doc.frames[0].outer.orientation == "counter_clockwise"


def test_missing_outer_names_frame():
    d = minimal_doc()
    del d["frames"][1]["outer"]
    with pytest.raises(SchemaViolation, match="frame 1"):
        document_from_dict(d)


@pytest.mark.parametrize("mutate", [
    lambda d: d.pop("subject"),
    lambda d: d.update(slice="2"),
    lambda d: d.update(frames=d["frames"][:1]),
    lambda d: d["frames"][1].update(t=0),
    lambda d: d["frames"][0].update(inner=[]),
    lambda d: d["frames"][0]["inner"].__setitem__(0, [1.0, "x"]),
])
def test_schema_violations(mutate):
    d = minimal_doc()
    mutate(d)
    with pytest.raises(SchemaViolation):
        document_from_dict(d)


def test_inner_outside_outer_is_geometry_error():
    d = minimal_doc()
    d["frames"][1]["inner"] = circle(16, 10.0, center=(150, 50)).tolist()
    with pytest.raises(GeometryError, match="frame 1"):
        document_from_dict(d)


def test_self_intersection_is_geometry_error():
    d = minimal_doc()
    d["frames"][0]["inner"][0], d["frames"][0]["inner"][5] = d["frames"][0]["inner"][5], d["frames"][0]["inner"][0]
    with pytest.raises(GeometryError, match="frame 0"):
        document_from_dict(d)


def test_parse_error_reports_line(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"subject": "a",\n "slice": 1,\n "frames": [,]}')
    with pytest.raises(ParseError, match="line 3"):
        load_contours(p)


def test_roundtrip(tmp_path):
    doc = synthetic_cycle(4)
    save_contours(doc, tmp_path / "c.json")
    back = load_contours(tmp_path / "c.json")
    assert document_to_dict(back) == document_to_dict(doc)


def two_frame(frame1_fn, t1=1):
    f0 = synthetic_cycle(2).frames[0]
    return ContourDocument("s", 0, (f0, frame1_fn(f0, t1)))


def test_identity_frames_zero_everything():
    bundle = run_deformation_pipeline(two_frame(lambda f, t: ContourFrame(t, f.inner, f.outer)))
    pr = bundle.pairs[0]
    assert np.abs(pr.u).max() <= 1e-12
    assert np.abs(pr.strains).max() <= 1e-12


def test_rigid_translation_zero_strain():
    bundle = run_deformation_pipeline(two_frame(lambda f, t: transformed_copy(f, t, shift=(0.3, 0.2))))
    pr = bundle.pairs[0]
    np.testing.assert_allclose(pr.u, np.tile([0.3, 0.2], (pr.mesh.n_nodes, 1)), atol=1e-12)
    assert np.abs(pr.strains).max() <= 1e-10


def test_dilation_strain():
    bundle = run_deformation_pipeline(two_frame(lambda f, t: transformed_copy(f, t, scale=1.01)))
    means = bundle.pairs[0].sectors.means
    assert not np.isnan(means).any()
    np.testing.assert_allclose(means[:, :2], 0.01, atol=1e-3)
    assert np.abs(means[:, 2]).max() <= 1e-3


def test_translation_equivariance():
    doc = synthetic_cycle(5)
    moved = ContourDocument(doc.subject, doc.slice, tuple(f.translated((-17.0, 23.5)) for f in doc.frames))
    a = run_deformation_pipeline(doc)
    b = run_deformation_pipeline(moved)
    for pa, pb in zip(a.pairs, b.pairs):
        np.testing.assert_allclose(pa.u, pb.u, atol=1e-12)
        np.testing.assert_allclose(pa.strains, pb.strains, atol=1e-12)


def test_pairwise_locality():
    doc = synthetic_cycle(8)
    full = run_deformation_pipeline(doc)
    head = run_deformation_pipeline(ContourDocument("s", 0, doc.frames[:4]))
    tail = run_deformation_pipeline(ContourDocument("s", 0, doc.frames[3:]))
    for pa, pb in zip(full.pairs, head.pairs + tail.pairs):
        assert (pa.t0, pa.t1) == (pb.t0, pb.t1)
        assert pa.u.tobytes() == pb.u.tobytes()
        assert pa.strains.tobytes() == pb.strains.tobytes()


def test_abnormal_region_changes_interior_only():
    doc = synthetic_cycle(3)
    base = run_deformation_pipeline(doc)
    cfg = PipelineConfig(materials=(MaterialParams(31000, 0.45), MaterialParams(310000, 0.45)),
                         regions=((0.0, 90.0, 1),))
    stiff = run_deformation_pipeline(doc, cfg)
    pa, pb = base.pairs[0], stiff.pairs[0]
    bnd = pa.mesh.boundary != 0
    np.testing.assert_array_equal(pa.u[bnd], pb.u[bnd])
    assert np.abs(pa.u[~bnd] - pb.u[~bnd]).max() > 0
    assert pb.mesh.material.any()


def test_config_validation():
    with pytest.raises(ValueError):
        PipelineConfig(tol=1e-3)
    with pytest.raises(ValueError):
        PipelineConfig(points=0)
    with pytest.raises(ValueError):
        PipelineConfig(regions=((0.0, 45.0, 1),))


def test_pipeline_errors_are_annotated():
    f0 = synthetic_cycle(2).frames[0]
    far = f0.translated((100.0, 0.0))
    doc = ContourDocument("s", 0, (f0, ContourFrame(1, far.inner, far.outer)))
    with pytest.raises(GeometryError, match="frames 0->1"):
        run_deformation_pipeline(doc)
    bundle = run_deformation_pipeline(doc, raise_errors=False)
    assert not bundle.ok and bundle.failures[0][:2] == (0, 1)


def test_write_outputs_layout(tmp_path):
    bundle = run_deformation_pipeline(synthetic_cycle(3), PipelineConfig(points=24, layers=3))
    write_outputs(bundle, tmp_path)
    names = sorted(p.name for p in tmp_path.iterdir())
    assert "displacements_0_1.csv" in names and "strain_elements_1_2.csv" in names
    assert "mesh_0.txt" in names and "mesh_1.txt" in names
    rows = (tmp_path / "sector_strain.csv").read_text().splitlines()
    assert rows[0] == "# schema_version=1"
    assert rows[1] == "pair,sector,mean_eps_x,mean_eps_y,mean_gamma_xy"
    assert len(rows) - 2 == 2 * 16
    disp = (tmp_path / "displacements_0_1.csv").read_text().splitlines()
    assert disp[1] == "node_id,x,y,u,v,u_radial"
    assert len(disp) - 2 == 24 * 4
    strain = (tmp_path / "strain_elements_0_1.csv").read_text().splitlines()
    assert strain[1] == "elem_id,centroid_x,centroid_y,eps_x,eps_y,gamma_xy,sector"
    assert len(strain) - 2 == 2 * 24 * 3
    mesh_lines = (tmp_path / "mesh_0.txt").read_text().splitlines()
    assert mesh_lines[0] == "# schema_version=1" and mesh_lines[1] == "96"
    assert mesh_lines[2].split()[-1] == "inner_boundary"
    assert mesh_lines[2 + 96] == "144"
    assert b"\r" not in (tmp_path / "sector_strain.csv").read_bytes()


def test_write_outputs_two_frames_single_pair(tmp_path, doc_path):
    bundle = run_deformation_pipeline(load_contours(doc_path))
    write_outputs(bundle, tmp_path)
    assert len(list(tmp_path.glob("displacements_*.csv"))) == 1


def test_cli_analyze_and_mesh_info(tmp_path, doc_path, capsys):
    assert main(["analyze", "--contours", str(doc_path), "--out", str(tmp_path / "o"), "--points", "20"]) == 0
    assert (tmp_path / "o" / "sector_strain.csv").exists()
    assert main(["mesh-info", "--contours", str(doc_path), "--points", "20", "--layers", "2"]) == 0
    out = capsys.readouterr().out
    assert "min_angle" in out and " 60 " in out


def test_cli_analyze_abnormal(tmp_path, doc_path):
    rc = main(["analyze", "--contours", str(doc_path), "--out", str(tmp_path / "o"),
               "--abnormal-start", "0", "--abnormal-span", "45", "--e2", "310000", "--nu2", "0.45"])
    assert rc == 0


def test_cli_failures_set_exit_code(tmp_path):
    doc = synthetic_cycle(3)
    far = doc.frames[2].translated((200.0, 0.0))
    bad = ContourDocument("s", 0, doc.frames[:2] + (ContourFrame(2, far.inner, far.outer),))
    save_contours(bad, tmp_path / "bad.json")
    assert main(["analyze", "--contours", str(tmp_path / "bad.json"), "--out", str(tmp_path / "o")]) == 1
    assert (tmp_path / "o" / "displacements_0_1.csv").exists()
    assert main(["analyze", "--contours", str(tmp_path / "missing.json"), "--out", str(tmp_path / "o")]) == 2


def test_cli_bench_small(tmp_path, capsys):
    rc = main(["bench-ring", "--coarse-points", "32", "--coarse-layers", "4", "--fine-points", "64",
               "--fine-layers", "8", "--out", str(tmp_path)])
    assert rc == 0
    rows = (tmp_path / "bench_correlations.csv").read_text().splitlines()
    assert rows[:2] == ["# schema_version=1", "sector,correlation"]
    assert len(rows) == 18
    assert "correlation" in capsys.readouterr().out
