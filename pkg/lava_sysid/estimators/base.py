"""
Base class for recursive estimators
"""

from abc import ABC, abstractmethod
from typing import Any, Dict, Optional

import numpy as np

from ..data.dataset import Dataset
from ..models.predictor import Model


class RecursiveEstimator(ABC):
    """Abstract base class for per-sample identification algorithms"""

    @abstractmethod
    def update(self, y: np.ndarray, phi: np.ndarray, gamma: np.ndarray):
        """Absorb one sample"""
        pass

    @abstractmethod
    def fit(self, data: Dataset) -> "RecursiveEstimator":
        """Absorb every sample of a record in order"""
        pass

    @abstractmethod
    def to_model(
        self, output_scale: float = 1.0, provenance: Optional[Dict[str, Any]] = None
    ) -> Model:
        """Freeze the current estimates into a Model"""
        pass

    @abstractmethod
    def get_statistics(self) -> Dict[str, Any]:
        """Get estimator statistics"""
        pass
