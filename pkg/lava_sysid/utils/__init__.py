"""
Utility functions for lava-sysid
"""

from .validators import (
    require_finite,
    require_positive,
    require_positive_int,
    require_shape,
)

__all__ = [
    "require_finite",
    "require_positive",
    "require_positive_int",
    "require_shape",
]
