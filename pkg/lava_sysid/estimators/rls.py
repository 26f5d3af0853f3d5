"""
Recursive least squares for the nominal parameters Theta_bar, the
cross-projection H and the gain P, plus the affine ARX baseline built on it.

    P(t)         = P(t-1) - P(t-1) phi phi' P(t-1) / (1 + phi' P(t-1) phi)
    Theta_bar(t) = Theta_bar(t-1) + (y - Theta_bar(t-1) phi) phi' P(t)
    H(t)         = H(t-1) + P(t) phi (gamma' - phi' H(t-1))

P(t) is computed first; the other two updates use the new gain.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

import numpy as np
from scipy import linalg

from ..data.dataset import Dataset
from ..errors import NumericError
from ..models.predictor import Model
from ..models.regressors import RegressorConfig, stack_regressor
from ..utils.validators import require_finite, require_positive, require_shape
from .base import RecursiveEstimator

logger = logging.getLogger(__name__)

# Initial gain P(0) = c I
DEFAULT_RLS_GAIN = 1e4


@dataclass
class RlsState:
    """Recursive least-squares state, updated in place by one writer"""

    theta_bar: np.ndarray  # n_y x p
    H: np.ndarray  # p x q
    P: np.ndarray  # p x p
    t: int = 0

    @classmethod
    def initial(cls, n_y: int, p: int, q: int = 0, c: float = DEFAULT_RLS_GAIN) -> "RlsState":
        require_positive(c, "c")
        return cls(
            theta_bar=np.zeros((n_y, p)),
            H=np.zeros((p, q)),
            P=c * np.eye(p),
        )

    @property
    def n_y(self) -> int:
        return self.theta_bar.shape[0]

    @property
    def p(self) -> int:
        return self.theta_bar.shape[1]

    @property
    def q(self) -> int:
        return self.H.shape[1]


def rls_update(
    state: RlsState, y: np.ndarray, phi: np.ndarray, gamma: Optional[np.ndarray] = None
) -> RlsState:
    """Absorb sample t into the RLS state (in place) and return it"""
    y = require_shape(require_finite(y, "y"), (state.n_y,), "y")
    phi = require_shape(require_finite(phi, "phi"), (state.p,), "phi")

    Pphi = state.P @ phi
    denom = 1.0 + phi @ Pphi
    P = state.P - np.outer(Pphi, Pphi) / denom
    # Symmetrize to keep rounding drift out of P
    P = 0.5 * (P + P.T)
    gain = P @ phi

    theta_bar = state.theta_bar + np.outer(y - state.theta_bar @ phi, gain)
    H = state.H
    if gamma is not None and state.q > 0:
        gamma = require_shape(require_finite(gamma, "gamma"), (state.q,), "gamma")
        H = H + np.outer(gain, gamma - H.T @ phi)

    if not (np.all(np.isfinite(P)) and np.all(np.isfinite(theta_bar)) and np.all(np.isfinite(H))):
        raise NumericError(f"RLS update produced non-finite values at t={state.t + 1}")

    state.P = P
    state.theta_bar = theta_bar
    state.H = H
    state.t += 1
    return state


def batch_ls(
    Phi: np.ndarray, Y: np.ndarray, Gamma: Optional[np.ndarray] = None
) -> Tuple[np.ndarray, np.ndarray]:
    """Theta_bar = Y Phi^+ and H' = Gamma Phi^+ (minimum-norm when rank-deficient)"""
    Phi = np.atleast_2d(np.asarray(Phi, dtype=float))
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    pinv = linalg.pinv(Phi)
    theta_bar = Y @ pinv
    if Gamma is None:
        H = np.zeros((Phi.shape[0], 0))
    else:
        H = (np.atleast_2d(np.asarray(Gamma, dtype=float)) @ pinv).T
    return theta_bar, H


class ArxEstimator(RecursiveEstimator):
    """Affine ARX model y(t) = Theta_bar phi(t) estimated by RLS"""

    def __init__(self, config: RegressorConfig, c: float = DEFAULT_RLS_GAIN):
        self.config = config
        self.c = c
        self.state = RlsState.initial(config.n_y, config.p, 0, c)

    def update(self, y: np.ndarray, phi: np.ndarray, gamma: Optional[np.ndarray] = None):
        rls_update(self.state, y, phi)

    def fit(self, data: Dataset) -> "ArxEstimator":
        self.config.check_dataset(data)
        for t in range(1, data.n_samples + 1):
            phi = stack_regressor(self.config, data.outputs, data.inputs, t)
            self.update(data.outputs[:, t - 1], phi)
        logger.info(f"ARX fit on {data.n_samples} samples (p={self.config.p})")
        return self

    def to_model(
        self, output_scale: float = 1.0, provenance: Optional[Dict[str, Any]] = None
    ) -> Model:
        return Model.from_dense(
            self.state.theta_bar.copy(),
            np.zeros((self.config.n_y, self.config.q)),
            self.config,
            output_scale=output_scale,
            provenance={"solver": "arx-rls", "c": self.c, **(provenance or {})},
        )

    def get_statistics(self) -> Dict[str, Any]:
        return {
            "samples": self.state.t,
            "parameters": int(self.state.theta_bar.size),
            "gain_trace": float(np.trace(self.state.P)),
        }
