"""Numerical laboratory for the grafted-collar model: a flat cylinder glued
to hyperbolic strips, its Fourier-mode fields, geodesic variations, and the
boundary-term and area identities that drive the injectivity mechanism."""

from .errors import (
    ConfigError,
    ConvergenceError,
    DomainError,
    GraftLabError,
    SeamPointError,
    SingularSystemError,
    SolvabilityError,
)
from .geometry import (
    ConformalFamily,
    GlobalField,
    GraftedCollar,
    conformal_modulus,
    conformal_modulus_quadrature,
    family_metric,
    gauss_curvature,
    grafted_length,
    gudermannian,
    metric_coefficient,
    total_area,
    total_area_quadrature,
)
from .identities import (
    IdentityReport,
    SolvedConfiguration,
    arc_length_derivative,
    area_derivative_analytic,
    area_derivative_geometric,
    area_derivative_report,
    boundary_term_closed,
    boundary_term_quadrature,
    extended_boundary_term,
    extended_master_identity,
    master_identity,
    n0_balance_coefficient,
    per_mode_determinant,
    slice_condition,
    slice_residual,
    solve_configuration,
)
from .spectral import (
    FourierSolution,
    QuadDiffModes,
    TraceModes,
    from_boundary_data,
    harmonicity_residual,
)
from .variation import (
    VariationField,
    extended_hyperbolic_neumann,
    geodesic_oracle,
    hyperbolic_neumann,
    matched_global_field,
    pinned_means,
    solve_amended_variation,
    solve_flat_variation,
)

__version__ = "1.0.0"

__all__ = [name for name in dir() if not name.startswith("_")]
