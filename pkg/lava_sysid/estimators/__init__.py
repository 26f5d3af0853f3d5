"""
Estimators: recursive least squares, LAVA-R and the batch MM solver
"""

from .base import RecursiveEstimator
from .lava import (
    CrossProducts,
    LavaEstimator,
    SolverState,
    WorkVars,
    coordinate_min,
    cyclic_minimize,
    step,
    weights_recursive,
)
from .mm_batch import (
    LatentStats,
    MlParams,
    cost_V,
    latent_stats,
    majorizer_value,
    mm_iterate,
    nuisance_update,
    solve_concentrated,
    weights_full,
)
from .rls import ArxEstimator, RlsState, batch_ls, rls_update

__all__ = [
    "RecursiveEstimator",
    "CrossProducts",
    "LavaEstimator",
    "SolverState",
    "WorkVars",
    "coordinate_min",
    "cyclic_minimize",
    "step",
    "weights_recursive",
    "LatentStats",
    "MlParams",
    "cost_V",
    "latent_stats",
    "majorizer_value",
    "mm_iterate",
    "nuisance_update",
    "solve_concentrated",
    "weights_full",
    "ArxEstimator",
    "RlsState",
    "batch_ls",
    "rls_update",
]
