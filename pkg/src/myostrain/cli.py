"""Command line entry point: ``myostrain {analyze,bench-ring,mesh-info}``."""
from __future__ import annotations

import argparse
import csv
import logging
import sys
import time
from pathlib import Path

import numpy as np

from .contours import DEFAULT_POINTS, prepare_frame, centroid
from .errors import MyostrainError
from .fem import DEFAULT_TOL, MaterialParams
from .mesh import DEFAULT_LAYERS, build_annular_mesh, mesh_quality_report
from .pipeline import SCHEMA_VERSION, PipelineConfig, load_contours, run_deformation_pipeline, write_outputs
from .ring import DEFAULT_COARSE, DEFAULT_FINE, RingSpec, run_benchmark
from .strain import DEFAULT_SECTORS

log = logging.getLogger("myostrain")


def _analyze(args) -> int:
    doc = load_contours(args.contours)
    materials = (MaterialParams(args.e, args.nu),)
    regions = ()
    if args.abnormal_span > 0:
        materials += (MaterialParams(args.e2, args.nu2),)
        regions = ((args.abnormal_start, args.abnormal_span, 1),)
    cfg = PipelineConfig(points=args.points, layers=args.layers, sectors=args.sectors, tol=args.tol,
                         materials=materials, regions=regions, out_dir=args.out)
    bundle = run_deformation_pipeline(doc, cfg, raise_errors=False)
    paths = write_outputs(bundle, args.out)
    print(f"subject {doc.subject} slice {doc.slice}: {len(bundle.pairs)} frame pairs processed, "
          f"{len(bundle.failures)} failed; {len(paths)} files written to {args.out}")
    for t0, t1, msg in bundle.failures:
        print(f"  FAILED {t0}->{t1}: {msg}", file=sys.stderr)
    return 0 if bundle.ok else 1


def _bench(args) -> int:
    spec = RingSpec(inner_radius=args.a, outer_radius=args.b, pressure=args.pressure,
                    e1=args.e1, nu1=args.nu1, e2=args.e2, nu2=args.nu2,
                    abnormal_start=args.abnormal_start, abnormal_span=args.abnormal_span)
    start = time.perf_counter()
    res = run_benchmark(spec, coarse=(args.coarse_points, args.coarse_layers),
                        fine=(args.fine_points, args.fine_layers))
    elapsed = time.perf_counter() - start

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    lines = [
        f"# schema_version={SCHEMA_VERSION}",
        "Ring benchmark: radial displacement correlation per sector",
        f"coarse mesh {res.coarse[0]} x {res.coarse[1]}, fine mesh {res.fine[0]} x {res.fine[1]}",
        f"{'sector':>6}  {'from':>6}  {'to':>6}  correlation",
    ]
    width = 360.0 / len(res.correlations)
    for s, c in enumerate(res.correlations, start=1):
        lines.append(f"{s:>6}  {(s - 1) * width:6.1f}  {s * width:6.1f}  {c:.4f}")
    lines.append(f"min {np.min(res.correlations):.4f}  mean {res.mean_correlation:.4f}  "
                 f"relative L2 displacement discrepancy {res.l2_discrepancy:.3e}")
    text = "\n".join(lines) + "\n"
    (out / "bench_report.txt").write_text(text)
    with open(out / "bench_correlations.csv", "w", newline="") as fh:
        fh.write(f"# schema_version={SCHEMA_VERSION}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["sector", "correlation"])
        for s, c in enumerate(res.correlations, start=1):
            w.writerow([s, repr(float(c))])
    print(text, end="")
    print(f"elapsed {elapsed:.2f} s")
    return 0


def _mesh_info(args) -> int:
    doc = load_contours(args.contours)
    print(f"{'t':>4} {'nodes':>6} {'elems':>6} {'min_area':>12} {'max_area':>12} {'min_angle':>9} {'max_aspect':>10}")
    for fr in doc.frames:
        prepared = prepare_frame(fr, centroid(fr.inner), args.points)
        mesh = build_annular_mesh(prepared.inner, prepared.outer, args.layers)
        q = mesh_quality_report(mesh)
        print(f"{fr.t:>4} {mesh.n_nodes:>6} {mesh.n_elements:>6} {q.min_area:12.4e} {q.max_area:12.4e} "
              f"{q.min_angle:9.2f} {q.max_aspect_ratio:10.3f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="myostrain", description="Wall displacement and strain from paired contours")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="run the deformation pipeline on a contour document")
    p.add_argument("--contours", required=True, help="contour document (JSON)")
    p.add_argument("--points", type=int, default=DEFAULT_POINTS, help="points per resampled contour")
    p.add_argument("--layers", type=int, default=DEFAULT_LAYERS, help="element layers across the wall")
    p.add_argument("--sectors", type=int, default=DEFAULT_SECTORS)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="solver relative residual tolerance")
    p.add_argument("--e", type=float, default=31000.0, help="Young's modulus, normal tissue")
    p.add_argument("--nu", type=float, default=0.45, help="Poisson ratio, normal tissue")
    p.add_argument("--abnormal-start", type=float, default=0.0, help="abnormal sector start (deg)")
    p.add_argument("--abnormal-span", type=float, default=0.0, help="abnormal sector span (deg); 0 disables")
    p.add_argument("--e2", type=float, default=310000.0)
    p.add_argument("--nu2", type=float, default=0.45)
    p.add_argument("--out", default="out")
    p.set_defaults(func=_analyze)

    p = sub.add_parser("bench-ring", help="two-material pressurized ring benchmark")
    p.add_argument("--a", type=float, default=1.0, help="inner radius")
    p.add_argument("--b", type=float, default=2.0, help="outer radius")
    p.add_argument("--pressure", type=float, default=1.0)
    p.add_argument("--e1", type=float, default=31000.0)
    p.add_argument("--nu1", type=float, default=0.45)
    p.add_argument("--e2", type=float, default=310000.0)
    p.add_argument("--nu2", type=float, default=0.45)
    p.add_argument("--abnormal-start", type=float, default=0.0)
    p.add_argument("--abnormal-span", type=float, default=45.0)
    p.add_argument("--coarse-points", type=int, default=DEFAULT_COARSE[0])
    p.add_argument("--coarse-layers", type=int, default=DEFAULT_COARSE[1])
    p.add_argument("--fine-points", type=int, default=DEFAULT_FINE[0])
    p.add_argument("--fine-layers", type=int, default=DEFAULT_FINE[1])
    p.add_argument("--out", default="out")
    p.set_defaults(func=_bench)

    p = sub.add_parser("mesh-info", help="mesh quality for each frame of a contour document")
    p.add_argument("--contours", required=True)
    p.add_argument("--points", type=int, default=DEFAULT_POINTS)
    p.add_argument("--layers", type=int, default=DEFAULT_LAYERS)
    p.set_defaults(func=_mesh_info)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (MyostrainError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
