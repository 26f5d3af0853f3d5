"""
Deployable refined predictor

    y_hat(t) = Theta_hat phi(t) + Z_hat gamma(t)

Z_hat is stored sparse; the learned models are parsimonious and only the
nonzero entries are kept.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse

from ..data.dataset import Dataset
from ..errors import DivergenceError, SchemaError
from .regressors import (
    RegressorConfig,
    build_gamma,
    build_phi,
    build_regressors,
    build_phi_matrix,
    evaluate_gamma,
    stack_regressor,
)

logger = logging.getLogger(__name__)

# Free-run outputs beyond this multiple of the training range abort the simulation
DIVERGENCE_FACTOR = 1e6


@dataclass(frozen=True, eq=False)
class Model:
    """Estimated (Theta_hat, Z_hat) with the regressor configuration.

    output_scale is the largest absolute training output; it sets the
    divergence threshold of free-run simulation.
    """

    theta_hat: np.ndarray
    z_hat: sparse.csr_array
    config: RegressorConfig
    output_scale: float = 1.0
    provenance: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        theta = np.array(self.theta_hat, dtype=float, ndmin=2)
        if theta.shape != (self.config.n_y, self.config.p):
            raise SchemaError(
                f"Theta_hat has shape {theta.shape}, expected {(self.config.n_y, self.config.p)}"
            )
        z = sparse.csr_array(self.z_hat, dtype=float)
        if z.shape != (self.config.n_y, self.config.q):
            raise SchemaError(
                f"Z_hat has shape {z.shape}, expected {(self.config.n_y, self.config.q)}"
            )
        z.eliminate_zeros()
        if z.nnz and self.config.ell is None:
            raise SchemaError("a model with a nonzero Z_hat needs basis boundaries ell")
        theta.setflags(write=False)
        object.__setattr__(self, "theta_hat", theta)
        object.__setattr__(self, "z_hat", z)

    @classmethod
    def from_dense(
        cls,
        theta_hat: np.ndarray,
        z_hat: np.ndarray,
        config: RegressorConfig,
        output_scale: float = 1.0,
        provenance: Optional[Dict[str, Any]] = None,
    ) -> "Model":
        return cls(theta_hat, sparse.csr_array(np.asarray(z_hat, dtype=float)), config,
                   output_scale, dict(provenance or {}))

    @classmethod
    def from_triplets(
        cls,
        theta_hat: np.ndarray,
        triplets: Sequence[Tuple[int, int, float]],
        config: RegressorConfig,
        output_scale: float = 1.0,
        provenance: Optional[Dict[str, Any]] = None,
    ) -> "Model":
        rows = [int(i) for i, _, _ in triplets]
        cols = [int(j) for _, j, _ in triplets]
        values = [float(v) for _, _, v in triplets]
        for i, j in zip(rows, cols):
            if not (0 <= i < config.n_y and 0 <= j < config.q):
                raise SchemaError(f"Z entry ({i}, {j}) out of bounds for {config.n_y}x{config.q}")
        z = sparse.coo_array((values, (rows, cols)), shape=(config.n_y, config.q)).tocsr()
        return cls(theta_hat, z, config, output_scale, dict(provenance or {}))

    def triplets(self) -> List[Tuple[int, int, float]]:
        """Nonzero entries of Z_hat as (row, col, value), row-major order"""
        coo = self.z_hat.tocoo()
        order = np.lexsort((coo.col, coo.row))
        return [(int(coo.row[k]), int(coo.col[k]), float(coo.data[k])) for k in order]

    @property
    def nonzero_count(self) -> int:
        return int(self.z_hat.nnz)

    @property
    def capacity(self) -> int:
        return self.config.n_y * self.config.q

    def z_dense(self) -> np.ndarray:
        return self.z_hat.toarray()

    def predict_phi(self, phi: np.ndarray) -> np.ndarray:
        """Theta_hat phi + Z_hat gamma(phi)"""
        y_hat = self.theta_hat @ phi
        if self.z_hat.nnz:
            y_hat = y_hat + self.z_hat @ build_gamma(self.config, phi)
        return y_hat


def predict_one_step(model: Model, data: Dataset, t: int) -> np.ndarray:
    """One-step-ahead prediction of sample t from measured history"""
    return model.predict_phi(build_phi(model.config, data, t))


def predict_series(model: Model, data: Dataset) -> np.ndarray:
    """One-step-ahead predictions for every sample (n_y x N)"""
    if model.z_hat.nnz:
        phi, gamma = build_regressors(model.config, data)
        return model.theta_hat @ phi + model.z_hat @ gamma
    return model.theta_hat @ build_phi_matrix(model.config, data)


def simulate_free_run(model: Model, data: Dataset) -> np.ndarray:
    """Free-run simulation driven by the measured inputs.

    Simulated outputs replace measurements in the regressor; pre-sample
    simulated outputs are zero. Raises DivergenceError once any output
    exceeds DIVERGENCE_FACTOR times the training output magnitude.
    """
    config = model.config
    config.check_dataset(data)
    n = data.n_samples
    simulated = np.zeros((config.n_y, n))
    limit = DIVERGENCE_FACTOR * (model.output_scale if model.output_scale > 0 else 1.0)
    outside = 0

    for t in range(1, n + 1):
        phi = stack_regressor(config, simulated, data.inputs, t)
        y_hat = model.theta_hat @ phi
        if model.z_hat.nnz:
            basis = evaluate_gamma(config, phi)
            outside += basis.out_of_bounds
            y_hat = y_hat + model.z_hat @ basis.gamma
        if not np.all(np.isfinite(y_hat)) or np.max(np.abs(y_hat)) > limit:
            raise DivergenceError(
                f"free-run simulation diverged at sample {t} "
                f"(|y| > {limit:.3g} or non-finite)",
                sample=t,
            )
        simulated[:, t - 1] = y_hat

    if outside:
        logger.warning(f"{outside} of {n} simulated regressors left the basis box")
    return simulated
