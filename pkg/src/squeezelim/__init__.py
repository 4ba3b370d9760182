"""Verification toolkit for the strong-squeezing limit of quantum stochastic
dynamics.

A unitary evolution driven by strongly squeezed vacuum noise admits an
essentially commutative approximation: one commuting quadrature drives the
dynamics, at the price of a correction Hamiltonian.  This package rederives
the underlying Ito-table algebra symbolically, evaluates the squared
approximation error exactly on finite-dimensional systems through a product
of contraction semigroups, and cross-checks the result with an independent
repeated-interaction (collision) discretization.
"""

from .model import (
    Coefficients,
    DegeneratePhaseError,
    ModelSpec,
    SqueezeParams,
    SystemModel,
    atom_model,
    build_model,
    cavity_model,
    custom_model,
    default_vector,
    derived_coefficients,
    make_squeeze_params,
    resolve_vector,
    scalar_model,
)
from .semigroup import (
    StepFunction,
    TransferGenerator,
    build_transfer_generator,
    error_norm_squared,
    sup_deviation,
    transfer_composition,
)
from .collision import (
    UnsupportedConfigurationError,
    brute_force_error,
    collision_error,
    collision_report,
    step_unitary,
)
from .experiments import (
    ConvergenceReport,
    ReportRow,
    estimate_rate,
    sweep_n,
    theta_scan,
    tk_check,
    truncation_agreement,
)
from . import ito_algebra, numkernel

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "Coefficients",
    "ConvergenceReport",
    "DegeneratePhaseError",
    "ModelSpec",
    "ReportRow",
    "SqueezeParams",
    "StepFunction",
    "SystemModel",
    "TransferGenerator",
    "UnsupportedConfigurationError",
    "atom_model",
    "brute_force_error",
    "build_model",
    "build_transfer_generator",
    "cavity_model",
    "collision_error",
    "collision_report",
    "custom_model",
    "default_vector",
    "derived_coefficients",
    "error_norm_squared",
    "estimate_rate",
    "ito_algebra",
    "make_squeeze_params",
    "numkernel",
    "resolve_vector",
    "scalar_model",
    "step_unitary",
    "sup_deviation",
    "sweep_n",
    "theta_scan",
    "tk_check",
    "transfer_composition",
    "truncation_agreement",
]
