"""Adaptive Fourier decomposition on the Hardy space of the unit disc.

Greedy sparse approximation over the reproducing-kernel dictionary, in a
classical single-zero flavor and a double-zero flavor whose optimally
selected parameters buy simultaneous value and derivative interpolation.
Also included: mono-component and higher-order variants, best n-term
parameter search, and verification reports for the energy identity,
the residual rate bound, and boundary zero crossings.
"""

from .analysis import (
    energy_identity_check,
    error_decay_table,
    rate_bound_check,
    verify_interpolation,
    zero_crossing_count,
)
from .engine import (
    Decomposition,
    DecompositionTerm,
    EngineConfig,
    SelectionResult,
    core_step,
    decompose,
    double_step,
    grid_select,
    higher_order_condition,
    higher_order_step,
    objective,
    partial_sum,
    refine_stationary,
    run_afd,
    run_higher_order,
    run_mono_component,
    select_parameter,
)
from .errors import ContractError, DimensionError, DomainError, SchemaError
from .kernels import (
    BasisSpec,
    basis_eval,
    gram_check,
    moebius_at,
    moebius_boundary,
    normalized_kernel,
    system_specs,
    szego_boundary,
)
from .nbest import NBestResult, optimize as nbest_optimize, projection_residual
from .signals import (
    BoundarySignal,
    anti_analytic_energy,
    eval_deriv_disc,
    eval_disc,
    inner_product,
    project_real,
    reconstruct_real,
)

__version__ = "0.1.0"

__all__ = [
    "BasisSpec",
    "BoundarySignal",
    "ContractError",
    "Decomposition",
    "DecompositionTerm",
    "DimensionError",
    "DomainError",
    "EngineConfig",
    "NBestResult",
    "SchemaError",
    "SelectionResult",
    "anti_analytic_energy",
    "basis_eval",
    "core_step",
    "decompose",
    "double_step",
    "energy_identity_check",
    "error_decay_table",
    "eval_deriv_disc",
    "eval_disc",
    "grid_select",
    "gram_check",
    "higher_order_condition",
    "higher_order_step",
    "inner_product",
    "moebius_at",
    "moebius_boundary",
    "nbest_optimize",
    "normalized_kernel",
    "objective",
    "partial_sum",
    "project_real",
    "projection_residual",
    "rate_bound_check",
    "reconstruct_real",
    "refine_stationary",
    "run_afd",
    "run_higher_order",
    "run_mono_component",
    "select_parameter",
    "system_specs",
    "szego_boundary",
    "verify_interpolation",
    "zero_crossing_count",
]
