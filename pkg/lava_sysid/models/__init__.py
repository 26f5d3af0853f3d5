"""
Regressor construction and the deployable refined predictor
"""

from .predictor import Model, predict_one_step, predict_series, simulate_free_run
from .regressors import (
    BASIS_FUNCTIONS,
    BasisVector,
    RegressorConfig,
    build_gamma,
    build_phi,
    build_regressors,
    estimate_bounds,
    evaluate_gamma,
    laplace_basis,
    out_of_bounds,
)

__all__ = [
    "Model",
    "predict_one_step",
    "predict_series",
    "simulate_free_run",
    "BASIS_FUNCTIONS",
    "BasisVector",
    "RegressorConfig",
    "build_gamma",
    "build_phi",
    "build_regressors",
    "estimate_bounds",
    "evaluate_gamma",
    "laplace_basis",
    "out_of_bounds",
]
