"""
Validation utilities for lava-sysid
"""

import logging
from typing import Tuple

import numpy as np

from ..errors import ArgumentError, NumericError, SchemaError

logger = logging.getLogger(__name__)


def require_positive(value: float, name: str) -> float:
    """Validate a strictly positive real"""
    if not (isinstance(value, (int, float, np.floating, np.integer)) and value > 0):
        raise ArgumentError(f"{name} must be positive, got {value!r}")
    return float(value)


def require_positive_int(value: int, name: str) -> int:
    """Validate a strictly positive integer"""
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 1:
        raise ArgumentError(f"{name} must be a positive integer, got {value!r}")
    return int(value)


def require_finite(array: np.ndarray, name: str) -> np.ndarray:
    """Raise NumericError if the array holds NaN or Inf."""
    array = np.asarray(array, dtype=float)
    if not np.all(np.isfinite(array)):
        bad = int(np.size(array) - np.count_nonzero(np.isfinite(array)))
        raise NumericError(f"{name} contains {bad} non-finite value(s)")
    return array


def require_shape(array: np.ndarray, shape: Tuple[int, ...], name: str) -> np.ndarray:
    """Validate the exact shape of an array"""
    array = np.asarray(array, dtype=float)
    if array.shape != tuple(shape):
        raise SchemaError(f"{name} has shape {array.shape}, expected {tuple(shape)}")
    return array


def parse_float_list(text: str, name: str) -> Tuple[float, ...]:
    """Parse a comma-separated list of positive floats (e.g. '0.5,1,2')"""
    try:
        values = tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise ArgumentError(f"{name} must be a comma-separated list of numbers: {text!r}")
    if not values:
        raise ArgumentError(f"{name} must not be empty")
    for v in values:
        require_positive(v, name)
    return values
