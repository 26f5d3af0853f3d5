"""
lava-sysid - Recursive nonlinear system identification with latent variables
"""

__version__ = "0.1.0"
__author__ = "N-Erickson"

# Lazy imports keep `lava-sysid --version` free of the numerical stack
__all__ = [
    "Dataset",
    "RegressorConfig",
    "Model",
    "LavaEstimator",
    "ArxEstimator",
    "load_csv",
    "estimate_bounds",
    "simulate_free_run",
    "run",
    "__version__",
]

_LAZY = {
    "Dataset": ("data.dataset", "Dataset"),
    "RegressorConfig": ("models.regressors", "RegressorConfig"),
    "Model": ("models.predictor", "Model"),
    "LavaEstimator": ("estimators.lava", "LavaEstimator"),
    "ArxEstimator": ("estimators.rls", "ArxEstimator"),
    "load_csv": ("data.dataset", "load_csv"),
    "estimate_bounds": ("models.regressors", "estimate_bounds"),
    "simulate_free_run": ("models.predictor", "simulate_free_run"),
    "run": ("cli", "run"),
}


def __getattr__(name):
    """Lazy import to avoid loading numpy/scipy on package import"""
    if name in _LAZY:
        import importlib

        module_name, attr = _LAZY[name]
        module = importlib.import_module(f".{module_name}", __name__)
        return getattr(module, attr)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
