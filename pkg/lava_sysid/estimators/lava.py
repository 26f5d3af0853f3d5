"""
LAVA-R: recursive latent-variable refinement of the nominal RLS predictor.

Each sample updates the RLS state and six running cross-products. From those
the per-row concentrated problem

    min_nu  || eps_bar_i - A nu ||_2 + || w_i * nu ||_1,   A = Gamma' - Phi' H

is assembled without touching stored data (T = A'A, rho_i = A' eps_bar_i,
kappa_i = ||eps_bar_i||^2) and improved by L cycles of exact coordinate
minimization warm-started at the previous Z.
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, NamedTuple, Optional

import numpy as np

from ..data.dataset import Dataset
from ..errors import NumericError
from ..models.predictor import Model
from ..models.regressors import RegressorConfig, evaluate_gamma, stack_regressor
from ..utils.validators import require_finite, require_positive_int, require_shape
from .base import RecursiveEstimator
from .rls import DEFAULT_RLS_GAIN, RlsState, rls_update

logger = logging.getLogger(__name__)

DEFAULT_CYCLES = 5
# Cap on cycles when a step is solved to a tolerance
DEFAULT_MAX_CYCLES = 10000
# Gram diagonals below this are treated as unexcited columns
BETA_EPS = 1e-12


@dataclass
class CrossProducts:
    """Running sums R^{a,b}(t) = sum_s a(s) b(s)'"""

    R_phiphi: np.ndarray  # p x p
    R_gamgam: np.ndarray  # q x q
    R_yy: np.ndarray  # n_y x n_y
    R_phigam: np.ndarray  # p x q
    R_phiy: np.ndarray  # p x n_y
    R_gamy: np.ndarray  # q x n_y

    @classmethod
    def zeros(cls, n_y: int, p: int, q: int) -> "CrossProducts":
        return cls(
            R_phiphi=np.zeros((p, p)),
            R_gamgam=np.zeros((q, q)),
            R_yy=np.zeros((n_y, n_y)),
            R_phigam=np.zeros((p, q)),
            R_phiy=np.zeros((p, n_y)),
            R_gamy=np.zeros((q, n_y)),
        )

    def update(self, y: np.ndarray, phi: np.ndarray, gamma: np.ndarray):
        self.R_phiphi += np.outer(phi, phi)
        self.R_gamgam += np.outer(gamma, gamma)
        self.R_yy += np.outer(y, y)
        self.R_phigam += np.outer(phi, gamma)
        self.R_phiy += np.outer(phi, y)
        self.R_gamy += np.outer(gamma, y)


@dataclass
class SolverState:
    """RLS state, cross-products and the current latent iterate Z_check"""

    rls: RlsState
    cross: CrossProducts
    z_check: np.ndarray  # n_y x q
    cycles: int = DEFAULT_CYCLES
    t: int = 0

    @classmethod
    def initial(
        cls, n_y: int, p: int, q: int, cycles: int = DEFAULT_CYCLES, c: float = DEFAULT_RLS_GAIN
    ) -> "SolverState":
        require_positive_int(cycles, "cycles")
        return cls(
            rls=RlsState.initial(n_y, p, q, c),
            cross=CrossProducts.zeros(n_y, p, q),
            z_check=np.zeros((n_y, q)),
            cycles=cycles,
        )

    @property
    def theta_hat(self) -> np.ndarray:
        """Theta_hat(t) = Theta_bar(t) - Z(t) H(t)'"""
        return self.rls.theta_bar - self.z_check @ self.rls.H.T


@dataclass
class WorkVars:
    """Quantities of the concentrated problem at time t.

    T is A'A (q x q); kappa, rho, eta and zeta hold one entry/row per output.
    eta_i = ||eps_bar_i - A z_i||^2 and zeta_i = A'(eps_bar_i - A z_i) are
    maintained incrementally during the coordinate cycles.
    """

    T: np.ndarray
    kappa: np.ndarray
    rho: np.ndarray
    eta: np.ndarray
    zeta: np.ndarray


class CycleResult(NamedTuple):
    z: np.ndarray
    eta: float
    zeta: np.ndarray
    cycles: int
    converged: bool


def gram_matrix(cross: CrossProducts, H: np.ndarray) -> np.ndarray:
    """T = R_gg - R_gphi H - H' R_phig + H' R_phiphi H"""
    R_phigam_H = cross.R_phigam.T @ H
    T = cross.R_gamgam - R_phigam_H - R_phigam_H.T + H.T @ cross.R_phiphi @ H
    return 0.5 * (T + T.T)


def work_vars(
    cross: CrossProducts, theta_bar: np.ndarray, H: np.ndarray, z: np.ndarray
) -> WorkVars:
    """Assemble T, kappa, rho, eta, zeta from the accumulators.

    rho_i uses the output cross-product R^{phi,y}:
        rho_i = R_gy[:, i] - R_gphi theta_i - H' R_phiy[:, i] + H' R_phiphi theta_i
    """
    T = gram_matrix(cross, H)
    R_pp_theta = cross.R_phiphi @ theta_bar.T  # p x n_y
    kappa = (
        np.diag(cross.R_yy)
        + np.einsum("ip,pi->i", theta_bar, R_pp_theta)
        - 2.0 * np.einsum("ip,pi->i", theta_bar, cross.R_phiy)
    )
    rho = (
        cross.R_gamy
        - cross.R_phigam.T @ theta_bar.T
        - H.T @ cross.R_phiy
        + H.T @ R_pp_theta
    ).T  # n_y x q
    Tz = z @ T
    zeta = rho - Tz
    eta = kappa - 2.0 * np.einsum("iq,iq->i", rho, z) + np.einsum("iq,iq->i", z, Tz)
    return WorkVars(T=T, kappa=kappa, rho=rho, eta=eta, zeta=zeta)


def coordinate_min(alpha: float, beta: float, g: float, w: float) -> float:
    """Exact minimizer of sqrt(alpha - 2 g z + beta z^2) + w |z|.

    Zero when alpha w^2 >= g^2; otherwise sign(g) r with
        r = |g|/beta - w/(beta sqrt(beta - w^2)) * sqrt(alpha beta - g^2)
    """
    if beta < BETA_EPS:
        return 0.0
    if alpha * w * w >= g * g:
        return 0.0
    slack = beta - w * w
    if slack <= 0.0:
        # alpha w^2 < g^2 <= alpha beta implies beta > w^2; only a violated
        # alpha beta >= g^2 gets here
        logger.warning(
            f"coordinate_min: beta - w^2 = {slack:.3g} with alpha w^2 < g^2; "
            f"alpha beta - g^2 = {alpha * beta - g * g:.3g}"
        )
        return 0.0
    radicand = max(alpha * beta - g * g, 0.0)
    r = abs(g) / beta - w / (beta * math.sqrt(slack)) * math.sqrt(radicand)
    if r <= 0.0:
        return 0.0
    return math.copysign(r, g)


def row_objective(eta: float, z: np.ndarray, w: np.ndarray) -> float:
    """V'(nu) = sqrt(eta) + ||w * nu||_1"""
    return math.sqrt(max(eta, 0.0)) + float(np.abs(w) @ np.abs(z))


def cyclic_minimize(
    T: np.ndarray,
    eta: float,
    zeta: np.ndarray,
    z: np.ndarray,
    w: np.ndarray,
    cycles: int,
    tol: Optional[float] = None,
) -> CycleResult:
    """Cyclic coordinate minimization of one row, j = 0..q-1 ascending.

    eta and zeta must describe the residual at z. Runs exactly `cycles` full
    cycles, or with tol set stops early once the relative objective change
    over a cycle drops below tol.
    """
    z = np.array(z, dtype=float)
    zeta = np.array(zeta, dtype=float)
    diag = [float(v) for v in np.diag(T)]
    weights = [float(v) for v in w]
    q = z.shape[0]
    objective = row_objective(eta, z, w)
    done = 0
    converged = tol is None

    for _ in range(cycles):
        for j in range(q):
            beta = diag[j]
            z_old = float(z[j])
            zeta_j = float(zeta[j])
            g = zeta_j + beta * z_old
            alpha = eta + beta * z_old * z_old + 2.0 * zeta_j * z_old
            z_new = coordinate_min(max(alpha, 0.0), beta, g, weights[j])
            if z_new == z_old:
                continue
            delta = z_old - z_new
            eta = eta + beta * delta * delta + 2.0 * delta * zeta_j
            zeta += T[:, j] * delta
            z[j] = z_new
        done += 1

        if tol is not None:
            updated = row_objective(eta, z, w)
            change = abs(objective - updated)
            objective = updated
            if change <= tol * max(abs(updated), np.finfo(float).tiny):
                converged = True
                break

    return CycleResult(z=z, eta=eta, zeta=zeta, cycles=done, converged=converged)


def weights_recursive(cross: CrossProducts, t: int) -> np.ndarray:
    """w_ij = sqrt(R_gg[j, j] / t), identical for every output row"""
    require_positive_int(t, "t")
    n_y = cross.R_yy.shape[0]
    w = np.sqrt(np.maximum(np.diag(cross.R_gamgam), 0.0) / t)
    return np.tile(w, (n_y, 1))


def step(
    state: SolverState,
    y: np.ndarray,
    phi: np.ndarray,
    gamma: np.ndarray,
    weights: Optional[np.ndarray] = None,
    tol: Optional[float] = None,
    max_cycles: int = DEFAULT_MAX_CYCLES,
) -> SolverState:
    """Absorb one sample and refine Z (in place).

    Without tol, state.cycles full coordinate cycles run per row. With tol,
    rows are solved until the relative objective change per cycle falls
    below tol (at most max_cycles). weights overrides the running weights.
    """
    y = require_finite(y, "y")
    phi = require_finite(phi, "phi")
    gamma = require_finite(gamma, "gamma")
    if weights is not None:
        weights = require_shape(weights, state.z_check.shape, "weights")

    rls_update(state.rls, y, phi, gamma)
    state.cross.update(y, phi, gamma)
    state.t += 1

    w = weights_recursive(state.cross, state.t) if weights is None else weights
    work = work_vars(state.cross, state.rls.theta_bar, state.rls.H, state.z_check)
    if not (np.all(np.isfinite(work.T)) and np.all(np.isfinite(work.rho))):
        raise NumericError(f"non-finite accumulators at t={state.t}")

    cycles = state.cycles if tol is None else max_cycles
    for i in range(state.rls.n_y):
        result = cyclic_minimize(
            work.T, float(work.eta[i]), work.zeta[i], state.z_check[i], w[i], cycles, tol
        )
        if not np.all(np.isfinite(result.z)):
            raise NumericError(f"coordinate cycles diverged at t={state.t}, row {i}")
        if tol is not None and not result.converged:
            logger.warning(
                f"row {i} not converged after {result.cycles} cycles at t={state.t}"
            )
        state.z_check[i] = result.z

    if logger.isEnabledFor(logging.DEBUG):
        logger.debug(
            f"t={state.t}: nonzero Z entries {np.count_nonzero(state.z_check)}"
            f"/{state.z_check.size}"
        )
    return state


class LavaEstimator(RecursiveEstimator):
    """Recursive LAVA-R estimator over a fixed regressor configuration"""

    def __init__(
        self, config: RegressorConfig, cycles: int = DEFAULT_CYCLES, c: float = DEFAULT_RLS_GAIN
    ):
        config.require_bounds()
        self.config = config
        self.c = c
        self.state = SolverState.initial(config.n_y, config.p, config.q, cycles, c)

    def update(self, y: np.ndarray, phi: np.ndarray, gamma: np.ndarray):
        step(self.state, y, phi, gamma)

    def fit(self, data: Dataset) -> "LavaEstimator":
        self.config.check_dataset(data)
        outside = 0
        for t in range(1, data.n_samples + 1):
            phi = stack_regressor(self.config, data.outputs, data.inputs, t)
            basis = evaluate_gamma(self.config, phi)
            outside += basis.out_of_bounds
            self.update(data.outputs[:, t - 1], phi, basis.gamma)
        if outside:
            logger.warning(
                f"{outside} of {data.n_samples} training regressors left the basis box"
            )
        logger.info(
            f"LAVA-R fit on {data.n_samples} samples: p={self.config.p}, q={self.config.q}, "
            f"nonzero Z {np.count_nonzero(self.state.z_check)}/{self.state.z_check.size}"
        )
        return self

    def to_model(
        self, output_scale: float = 1.0, provenance: Optional[Dict[str, Any]] = None
    ) -> Model:
        return Model.from_dense(
            self.state.theta_hat,
            self.state.z_check,
            self.config,
            output_scale=output_scale,
            provenance={
                "solver": "lava-r",
                "L": self.state.cycles,
                "c": self.c,
                **(provenance or {}),
            },
        )

    def get_statistics(self) -> Dict[str, Any]:
        return {
            "samples": self.state.t,
            "cycles": self.state.cycles,
            "nonzero": int(np.count_nonzero(self.state.z_check)),
            "capacity": int(self.state.z_check.size),
        }
