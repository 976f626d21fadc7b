"""Pseudospectral solver for gradient flows of unit director fields under the
splay/twist/bend (Oseen-Frank) elastic energy.

The time integrator is an implicit midpoint-rotational step built on discrete
gradients: it preserves |n| = 1 pointwise up to the nonlinear solver
tolerance and dissipates the energy unconditionally.
"""

from .discrete_gradient import (
    DiscreteGradientKind,
    Gonzalez,
    MeanValue,
    OseenFrank,
    dg_gonzalez,
    dg_mean_value,
    dg_oseen_frank,
    energy_difference_residual,
    kind_from_name,
)
from .energy import (
    ElasticParams,
    EnergyBreakdown,
    constrained_rhs,
    energy,
    variational_derivative,
)
from .fields import (
    DirectorField,
    Grid,
    ScalarField,
    cross,
    discrete_inner,
    dot,
    field_from_fn,
    lincomb,
    linf_length_error,
    scale_by_scalar_field,
)
from .manufactured import (
    ConvergenceReport,
    exact_field,
    exact_solution,
    exact_time_derivative,
    forcing,
    spatial_convergence_study,
    temporal_convergence_study,
)
from .newton_krylov import SolveStats, SolverConfig, SolverFailure
from .spectral import SpectralPlan, curl, divergence, grad, grad_div, partial
from .stepper import StepRecord, TimeControls, adaptive_tau, rdg_residual, run, step

__version__ = "0.1.0"

__all__ = [
    "ConvergenceReport",
    "DirectorField",
    "DiscreteGradientKind",
    "ElasticParams",
    "EnergyBreakdown",
    "Gonzalez",
    "Grid",
    "MeanValue",
    "OseenFrank",
    "ScalarField",
    "SolveStats",
    "SolverConfig",
    "SolverFailure",
    "SpectralPlan",
    "StepRecord",
    "TimeControls",
    "adaptive_tau",
    "constrained_rhs",
    "cross",
    "curl",
    "dg_gonzalez",
    "dg_mean_value",
    "dg_oseen_frank",
    "discrete_inner",
    "divergence",
    "dot",
    "energy",
    "energy_difference_residual",
    "exact_field",
    "exact_solution",
    "exact_time_derivative",
    "field_from_fn",
    "forcing",
    "grad",
    "grad_div",
    "kind_from_name",
    "lincomb",
    "linf_length_error",
    "partial",
    "rdg_residual",
    "run",
    "scale_by_scalar_field",
    "spatial_convergence_study",
    "step",
    "temporal_convergence_study",
    "variational_derivative",
]
