"""Numerical workbench for the periodic initial-boundary value problem of a
sign-changing Liouville-type equation and its generalization."""

from .errors import EmptyCurve, NearSingular, NoFiniteTime
from .problem_model import (
    BoundaryIntegral,
    CompatibilityReport,
    FunctionDescriptor,
    GridFunction,
    ProblemSpec,
    Psi0Profile,
    build_G,
    build_psi0,
    check_compatibility,
    constant,
    exponential,
    extract_features,
    invert_G,
    load_problem_spec,
    polynomial,
    singular_boundary,
    spec_hash,
)
from .closed_form_solver import (
    SingularCurve,
    SolutionField,
    denominator,
    evaluate_field,
    evaluate_u,
    jump_transport,
    singular_curve,
)
from .regularity_analyzer import (
    CuspModel,
    RegularityReport,
    classify,
    fit_cusp,
    lp_asymptotic_constant,
    lp_blowup_fit,
    lp_norm,
    singular_boundary_report,
)
from .generalized_integrator import (
    BoundsReport,
    GeneralizedState,
    Nonlinearity,
    Trajectory,
    blowup_bounds,
    compute_H0_alpha0,
    detect_blowup,
    identity_F,
    integrate_general,
    power_F,
    power_integral,
    power_integral_limit,
    table_F,
)
from .verification import (
    ResidualReport,
    gamma_identity,
    pde_residual,
    r_invariance,
    schwarzian,
)
from . import catalog

__version__ = "0.1.0"

__all__ = [
    "BoundaryIntegral",
    "BoundsReport",
    "CompatibilityReport",
    "CuspModel",
    "EmptyCurve",
    "FunctionDescriptor",
    "GeneralizedState",
    "GridFunction",
    "NearSingular",
    "NoFiniteTime",
    "Nonlinearity",
    "ProblemSpec",
    "Psi0Profile",
    "RegularityReport",
    "ResidualReport",
    "SingularCurve",
    "SolutionField",
    "Trajectory",
    "blowup_bounds",
    "build_G",
    "build_psi0",
    "catalog",
    "check_compatibility",
    "classify",
    "compute_H0_alpha0",
    "constant",
    "denominator",
    "detect_blowup",
    "evaluate_field",
    "evaluate_u",
    "exponential",
    "extract_features",
    "fit_cusp",
    "gamma_identity",
    "identity_F",
    "integrate_general",
    "invert_G",
    "jump_transport",
    "load_problem_spec",
    "lp_asymptotic_constant",
    "lp_blowup_fit",
    "lp_norm",
    "pde_residual",
    "polynomial",
    "power_F",
    "power_integral",
    "power_integral_limit",
    "r_invariance",
    "schwarzian",
    "singular_boundary",
    "singular_boundary_report",
    "singular_curve",
    "spec_hash",
    "table_F",
]
