"""SCD calculus, semismooth* Newton iteration and regularity diagnostics
for generalized equations 0 in f(x) + N_C(x) with polyhedral C."""

from .bundle import DUAL, PRIMAL, DerivativeBundle
from .diagnostics import (
    RegularityReport,
    analyze,
    monotone_strong_regularity,
    scd_regularity,
    strong_regularity_certificate,
    subregularity_modulus,
    tilt_stability,
)
from .newton import SolverOptions, approximation_step, natural_residual, newton_step, select_subspace, solve
from .polyhedral import (
    PolyhedralCone,
    PolyhedralSet,
    cone_generators,
    critical_cone,
    faces,
    project,
    sp_star_normal_cone,
    tangent_cone,
)
from .problem import (
    GeneralizedEquation,
    affine_map,
    bundle_at,
    graph_point,
    lift_jacobians,
    named_map,
)
from .subspace import Subspace, adjoint, c_matrix, distance, from_basis, is_regular, operator_norm, transform

__all__ = [
    "DUAL",
    "DerivativeBundle",
    "GeneralizedEquation",
    "PRIMAL",
    "PolyhedralCone",
    "PolyhedralSet",
    "RegularityReport",
    "SolverOptions",
    "Subspace",
    "adjoint",
    "affine_map",
    "analyze",
    "approximation_step",
    "bundle_at",
    "c_matrix",
    "cone_generators",
    "critical_cone",
    "distance",
    "faces",
    "from_basis",
    "graph_point",
    "is_regular",
    "lift_jacobians",
    "monotone_strong_regularity",
    "named_map",
    "natural_residual",
    "newton_step",
    "operator_norm",
    "project",
    "scd_regularity",
    "select_subspace",
    "solve",
    "sp_star_normal_cone",
    "strong_regularity_certificate",
    "subregularity_modulus",
    "tangent_cone",
    "tilt_stability",
    "transform",
]

__version__ = "0.1.0"
