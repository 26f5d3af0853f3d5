"""
Validation metrics and the saturation benchmark harness
"""

from .experiments import (
    SaturationSystemSpec,
    SweepConfig,
    run_amplitude_sweep,
    simulate_saturation,
    write_sweep_csv,
)
from .metrics import fit_metric, rmse

__all__ = [
    "SaturationSystemSpec",
    "SweepConfig",
    "run_amplitude_sweep",
    "simulate_saturation",
    "write_sweep_csv",
    "fit_metric",
    "rmse",
]
