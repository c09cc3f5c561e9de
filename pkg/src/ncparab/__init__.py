"""Galerkin solver and verification suite for complex-valued parabolic
problems with degenerate (non-coercive) Robin boundary conditions."""

from .assembly import (
    AssembledForms,
    apply_S_constraints,
    assemble_first_order,
    assemble_forms,
    assemble_load,
    assemble_mass,
    assemble_plus_form,
    dual_norm,
)
from .estimates import (
    EstimateReport,
    apriori_bounds,
    check_continuity,
    check_uniqueness_condition,
    compute_constants,
)
from .integrator import (
    GalerkinSystem,
    GalerkinTrajectory,
    build_galerkin_system,
    project_initial,
    reconstruct_solution,
    solve_evolution,
    step_theta,
)
from .meshing import Mesh, build_mesh
from .problem import (
    FactorizedPrincipal,
    Interval,
    ProblemSpec,
    Rectangle,
    UnitDiskPolygon,
    factorize_principal,
    split_zero_order,
    validate_coefficients,
)
from .sharpness import (
    find_divergence_epsilon,
    series_hs_lower_bound,
    series_plus_norm,
)
from .spectral import (
    EigenBasis,
    cholesky_spd,
    generalized_eigenbasis,
    hermitian_eigen,
    verify_orthogonality,
)

__version__ = "0.1.0"
