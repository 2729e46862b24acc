"""Additional-food predator-prey model: equilibria, bifurcations, simulation, control."""

from ._core import (
    DomainError,
    Error,
    InfeasibleError,
    ModelParams,
    NumericalError,
    base_region,
    continuation,
    equilibria,
    integrate,
    interior_quintic,
    jacobian,
    predator_nullcline_y,
    prey_nullcline_y,
    resultant_folds,
    rhs,
    run_checks,
    saddlenode_xi,
    solve_control,
    transcritical_xi,
)

__all__ = [
    "DomainError",
    "Error",
    "InfeasibleError",
    "ModelParams",
    "NumericalError",
    "base_region",
    "continuation",
    "equilibria",
    "integrate",
    "interior_quintic",
    "jacobian",
    "predator_nullcline_y",
    "prey_nullcline_y",
    "resultant_folds",
    "rhs",
    "run_checks",
    "saddlenode_xi",
    "solve_control",
    "transcritical_xi",
]
