"""
Validation metrics for simulated model output
"""

import logging
from typing import Union

import numpy as np

from ..errors import ArgumentError, SchemaError, UndefinedMetricError

logger = logging.getLogger(__name__)


def _aligned(simulated: np.ndarray, measured: np.ndarray, skip: int):
    simulated = np.asarray(simulated, dtype=float)
    measured = np.asarray(measured, dtype=float)
    if simulated.shape != measured.shape:
        raise SchemaError(
            f"simulated shape {simulated.shape} does not match measured {measured.shape}"
        )
    if skip < 0 or skip >= simulated.shape[-1]:
        raise ArgumentError(f"skip must lie in 0..{simulated.shape[-1] - 1}, got {skip}")
    return simulated[..., skip:], measured[..., skip:]


def rmse(simulated: np.ndarray, measured: np.ndarray, skip: int = 0) -> np.ndarray:
    """Per-channel RMSE_i = sqrt(mean_t E (y_i - y_hat_i)^2).

    Arrays are n_y x N, or runs x n_y x N where the expectation is the mean
    over Monte Carlo runs. The first `skip` samples (warm-up) are excluded.
    """
    simulated, measured = _aligned(simulated, measured, skip)
    if simulated.ndim not in (2, 3):
        raise SchemaError(f"expected (n_y, N) or (runs, n_y, N), got {simulated.shape}")
    err = (measured - simulated) ** 2
    if err.ndim == 3:
        err = err.mean(axis=0)
    return np.sqrt(err.mean(axis=-1))


def fit_metric(
    simulated: np.ndarray, measured: np.ndarray, skip: int = 0
) -> Union[float, np.ndarray]:
    """FIT = 100 (1 - ||y - y_hat|| / ||y - mean(y)||) in percent.

    Accepts one channel (vector) or n_y x N; returns a float or one value per
    channel. Raises UndefinedMetricError for a constant measured channel.
    """
    simulated, measured = _aligned(simulated, measured, skip)
    single = measured.ndim == 1
    simulated = np.atleast_2d(simulated)
    measured = np.atleast_2d(measured)

    centered = np.linalg.norm(measured - measured.mean(axis=1, keepdims=True), axis=1)
    constant = centered == 0
    if constant.any():
        raise UndefinedMetricError(
            f"FIT is undefined for constant channel(s) {np.flatnonzero(constant).tolist()}"
        )
    fit = 100.0 * (1.0 - np.linalg.norm(measured - simulated, axis=1) / centered)
    return float(fit[0]) if single else fit
