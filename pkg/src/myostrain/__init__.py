"""Wall displacement and strain estimation from paired inner/outer contours.

Contours at two instants are ordered about the inner-contour centroid and
index-matched; their point-wise displacements drive a plane-stress
finite-element solve over the wall, from which constant-strain-triangle
strains and 16-sector summaries follow. A two-material pressurized ring
with a closed-form homogeneous limit checks the whole chain.
"""
from .contours import (
    BoundaryDisplacementField,
    Contour,
    ContourFrame,
    ReferencePoint,
    centroid,
    compute_boundary_displacements,
    normalize_contour,
    order_contour,
    prepare_pair,
    resample_contour,
)
from .fem import (
    DirichletBC,
    DisplacementSolution,
    LinearSystem,
    MaterialParams,
    TractionBC,
    apply_dirichlet,
    apply_traction,
    assemble_global,
    constitutive_matrix,
    element_stiffness,
    solve_system,
)
from .mesh import Mesh, build_annular_mesh, mesh_quality_report, tag_regions
from .pipeline import (
    ContourDocument,
    OutputBundle,
    PipelineConfig,
    load_contours,
    run_deformation_pipeline,
    write_outputs,
)
from .ring import RingSpec, lame_reference, pearson_correlation, reference_pressure_solve, run_benchmark
from .strain import (
    SectorReport,
    element_strain,
    element_strains,
    nodal_strain_average,
    radial_displacement,
    sector_aggregate,
)

__version__ = "0.1.0"
