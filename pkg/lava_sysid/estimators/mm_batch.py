"""
Batch maximum-likelihood machinery for the latent-variable model.

With diagonal Sigma and D the stacked covariance

    Lambda = Gamma~ D Gamma~' + I_N (x) Sigma

decouples by output row into N x N blocks

    Omega_i = Gamma' diag(d_i) Gamma + sigma_i I_N

so every quantity below is computed row by row from Cholesky factors of
Omega_i. vec(Z) is column-major: entry (i, j) sits at index j * n_y + i.

The majorization-minimization loop alternates data-adaptive weights at the
current point, the concentrated convex solve and closed-form nuisance
updates; the cost V decreases monotonically.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Tuple

import numpy as np
from scipy import linalg

from ..errors import ArgumentError, NumericError, SchemaError
from ..utils.validators import require_finite, require_positive_int
from .lava import DEFAULT_MAX_CYCLES, cyclic_minimize
from .rls import batch_ls

logger = logging.getLogger(__name__)

DEFAULT_MM_TOL = 1e-8
DEFAULT_MM_ITERS = 20
DEFAULT_SOLVE_TOL = 1e-10
SIGMA_FLOOR = 1e-12

# Omega_i is formed densely
MAX_DENSE_SAMPLES = 2000


@dataclass(frozen=True, eq=False)
class MlParams:
    """theta = {Theta, D, Sigma} with D given by its n_y x q diagonal grid d"""

    Theta: np.ndarray  # n_y x p
    d: np.ndarray  # n_y x q, d_ij >= 0
    sigma: np.ndarray  # n_y, sigma_i > 0

    def __post_init__(self):
        Theta = np.array(self.Theta, dtype=float, ndmin=2)
        d = np.array(self.d, dtype=float, ndmin=2)
        sigma = np.array(self.sigma, dtype=float, ndmin=1)
        if d.shape[0] != Theta.shape[0] or sigma.shape != (Theta.shape[0],):
            raise SchemaError(
                f"inconsistent parameter shapes: Theta {Theta.shape}, d {d.shape}, "
                f"sigma {sigma.shape}"
            )
        if not (np.all(np.isfinite(d)) and np.all(d >= 0)):
            raise ArgumentError("all d_ij must be finite and non-negative")
        if not (np.all(np.isfinite(sigma)) and np.all(sigma > 0)):
            raise ArgumentError(f"all sigma_i must be positive, got {sigma}")
        require_finite(Theta, "Theta")
        object.__setattr__(self, "Theta", Theta)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "sigma", sigma)

    @classmethod
    def initial(
        cls,
        n_y: int,
        p: int,
        q: int,
        Theta0: Optional[np.ndarray] = None,
        sigma0: Optional[np.ndarray] = None,
    ) -> "MlParams":
        """theta_0 = {Theta_0, 0, Sigma_0}; defaults to {0, 0, I}"""
        return cls(
            Theta=np.zeros((n_y, p)) if Theta0 is None else Theta0,
            d=np.zeros((n_y, q)),
            sigma=np.ones(n_y) if sigma0 is None else sigma0,
        )

    @property
    def n_y(self) -> int:
        return self.Theta.shape[0]


@dataclass
class LatentStats:
    """Gaussian posterior of vec(Z) given the data"""

    mean: np.ndarray  # n_y*q
    cov: np.ndarray  # n_y*q x n_y*q
    z_mean: np.ndarray  # posterior mean as an n_y x q matrix


class ConcentratedSolution(NamedTuple):
    theta_hat: np.ndarray
    z_hat: np.ndarray
    converged: bool


@dataclass
class MmIterate:
    """One point of the MM sequence.

    params is theta_k; theta_hat and z_hat are the concentrated minimizer
    that produced it (the initial point for k = 0, with Z = 0).
    """

    k: int
    params: MlParams
    theta_hat: np.ndarray
    z_hat: np.ndarray
    cost: float
    converged: bool = True


class _RowFactor(NamedTuple):
    factor: Tuple[np.ndarray, bool]
    logdet: float
    trace: float  # tr Omega^{-1}
    quad: np.ndarray  # gamma_j' Omega^{-1} gamma_j, one per basis row


def _check_data(
    Phi: np.ndarray, Gamma: np.ndarray, Y: np.ndarray
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    Phi = require_finite(np.atleast_2d(Phi), "Phi")
    Gamma = require_finite(np.atleast_2d(Gamma), "Gamma")
    Y = require_finite(np.atleast_2d(Y), "Y")
    n = Phi.shape[1]
    if Gamma.shape[1] != n or Y.shape[1] != n:
        raise SchemaError(
            f"sample counts differ: Phi {Phi.shape}, Gamma {Gamma.shape}, Y {Y.shape}"
        )
    if n > MAX_DENSE_SAMPLES:
        raise ArgumentError(
            f"batch computations form N x N covariances; N={n} exceeds {MAX_DENSE_SAMPLES}"
        )
    return Phi, Gamma, Y


def _check_params(params: MlParams, Phi: np.ndarray, Gamma: np.ndarray, Y: np.ndarray):
    if params.Theta.shape != (Y.shape[0], Phi.shape[0]) or params.d.shape != (
        Y.shape[0],
        Gamma.shape[0],
    ):
        raise SchemaError(
            f"parameters (Theta {params.Theta.shape}, d {params.d.shape}) do not match "
            f"data (n_y={Y.shape[0]}, p={Phi.shape[0]}, q={Gamma.shape[0]})"
        )


def _row_factor(Gamma: np.ndarray, d_i: np.ndarray, sigma_i: float) -> _RowFactor:
    n = Gamma.shape[1]
    omega = (Gamma.T * d_i) @ Gamma + sigma_i * np.eye(n)
    try:
        factor = linalg.cho_factor(omega, lower=True)
    except linalg.LinAlgError as e:
        raise NumericError(f"covariance block is not positive definite: {e}")
    logdet = 2.0 * float(np.sum(np.log(np.diag(factor[0]))))
    inverse = linalg.cho_solve(factor, np.eye(n))
    solved = linalg.cho_solve(factor, Gamma.T)
    quad = np.sum(Gamma.T * solved, axis=0)
    return _RowFactor(factor, logdet, float(np.trace(inverse)), quad)


def _row_factors(params: MlParams, Gamma: np.ndarray) -> List[_RowFactor]:
    return [_row_factor(Gamma, params.d[i], params.sigma[i]) for i in range(params.n_y)]


def cost_V(params: MlParams, Phi: np.ndarray, Gamma: np.ndarray, Y: np.ndarray) -> float:
    """V(theta) = ||y - Phi~ alpha||^2_{Lambda^-1} + ln|Lambda| (no 2 pi terms)"""
    Phi, Gamma, Y = _check_data(Phi, Gamma, Y)
    _check_params(params, Phi, Gamma, Y)
    total = 0.0
    for i, row in enumerate(_row_factors(params, Gamma)):
        r = Y[i] - params.Theta[i] @ Phi
        total += float(r @ linalg.cho_solve(row.factor, r)) + row.logdet
    return total


def log_likelihood(params: MlParams, Phi: np.ndarray, Gamma: np.ndarray, Y: np.ndarray) -> float:
    """ln p(Y | theta) with the standard Gaussian normalization"""
    n_total = np.atleast_2d(Y).size
    return -0.5 * (cost_V(params, Phi, Gamma, Y) + n_total * math.log(2.0 * math.pi))


def latent_stats(
    params: MlParams, Phi: np.ndarray, Gamma: np.ndarray, Y: np.ndarray
) -> LatentStats:
    """Posterior mean D Gamma~' Lambda^-1 (y - Phi~ alpha) and covariance of vec(Z).

    The covariance is formed as D - D Gamma~' Lambda^-1 Gamma~ D, which is
    the information form (D^-1 + Gamma~'(I (x) Sigma^-1) Gamma~)^-1 when D is
    invertible and leaves d_ij = 0 coordinates at mean 0, variance 0.
    """
    Phi, Gamma, Y = _check_data(Phi, Gamma, Y)
    _check_params(params, Phi, Gamma, Y)
    n_y, q = params.d.shape
    mean = np.zeros(n_y * q)
    cov = np.zeros((n_y * q, n_y * q))
    z_mean = np.zeros((n_y, q))

    for i, row in enumerate(_row_factors(params, Gamma)):
        r = Y[i] - params.Theta[i] @ Phi
        K = Gamma * params.d[i][:, None]  # D_i Gamma, q x N
        z_mean[i] = K @ linalg.cho_solve(row.factor, r)
        cov_i = np.diag(params.d[i]) - K @ linalg.cho_solve(row.factor, K.T)
        idx = np.arange(q) * n_y + i
        mean[idx] = z_mean[i]
        cov[np.ix_(idx, idx)] = 0.5 * (cov_i + cov_i.T)

    return LatentStats(mean=mean, cov=cov, z_mean=z_mean)


def weights_full(point: MlParams, Gamma: np.ndarray) -> np.ndarray:
    """w_ij = sqrt(gamma_j' Omega~_i^-1 gamma_j / tr Omega~_i^-1)"""
    Gamma = require_finite(np.atleast_2d(Gamma), "Gamma")
    if point.d.shape[1] != Gamma.shape[0]:
        raise SchemaError(f"d has {point.d.shape[1]} columns but Gamma has {Gamma.shape[0]} rows")
    rows = [np.sqrt(np.maximum(f.quad, 0.0) / f.trace) for f in _row_factors(point, Gamma)]
    return np.vstack(rows)


def tangent_constant(point: MlParams, Gamma: np.ndarray) -> float:
    """K~ = ln|Omega~| - tr(Omega~^-1 (I (x) Sigma~)) - tr(Gamma~' Omega~^-1 Gamma~ D~)"""
    total = 0.0
    for i, row in enumerate(_row_factors(point, np.atleast_2d(Gamma))):
        total += row.logdet - point.sigma[i] * row.trace - float(point.d[i] @ row.quad)
    return total


def nuisance_update(
    theta_hat: np.ndarray,
    z_hat: np.ndarray,
    point: MlParams,
    Phi: np.ndarray,
    Gamma: np.ndarray,
    Y: np.ndarray,
) -> MlParams:
    """Closed-form minimizers of the majorizer over Sigma and D.

    sigma_i = ||y_i - Phi' theta_i - Gamma' z_i|| / sqrt(tr Omega~_i^-1)
    d_ij    = |z_ij| / sqrt(gamma_j' Omega~_i^-1 gamma_j)
    """
    Phi, Gamma, Y = _check_data(Phi, Gamma, Y)
    _check_params(point, Phi, Gamma, Y)
    theta_hat = np.atleast_2d(theta_hat)
    z_hat = np.atleast_2d(z_hat)
    n_y, q = point.d.shape
    sigma = np.empty(n_y)
    d = np.zeros((n_y, q))

    for i, row in enumerate(_row_factors(point, Gamma)):
        if not row.trace > 0:
            raise NumericError(f"tr Omega^-1 is {row.trace} for row {i}")
        residual = Y[i] - theta_hat[i] @ Phi - z_hat[i] @ Gamma
        sigma[i] = float(np.linalg.norm(residual)) / math.sqrt(row.trace)
        if sigma[i] < SIGMA_FLOOR:
            logger.warning(f"sigma_{i} = {sigma[i]:.3g} (perfect fit); floored at {SIGMA_FLOOR}")
            sigma[i] = SIGMA_FLOOR
        live = row.quad > 0
        d[i, live] = np.abs(z_hat[i, live]) / np.sqrt(row.quad[live])

    return MlParams(Theta=theta_hat, d=d, sigma=sigma)


def concentrated_objective(
    theta: np.ndarray,
    z: np.ndarray,
    weights: np.ndarray,
    Phi: np.ndarray,
    Gamma: np.ndarray,
    Y: np.ndarray,
) -> float:
    """sum_i ||y_i - Phi' theta_i - Gamma' z_i||_2 + ||w_i * z_i||_1"""
    residual = np.atleast_2d(Y) - np.atleast_2d(theta) @ Phi - np.atleast_2d(z) @ Gamma
    return float(np.sum(np.linalg.norm(residual, axis=1)) + np.sum(np.abs(weights * z)))


def solve_concentrated(
    weights: np.ndarray,
    Phi: np.ndarray,
    Gamma: np.ndarray,
    Y: np.ndarray,
    tol: float = DEFAULT_SOLVE_TOL,
    max_cycles: int = DEFAULT_MAX_CYCLES,
) -> ConcentratedSolution:
    """Weighted group-norm/l1 problem with Theta concentrated out.

    Theta_hat = Theta_bar - Z H' with Theta_bar, H the least-squares fits;
    each row of Z is found by cyclic coordinate descent on
    ||eps_bar_i - A nu||_2 + ||w_i * nu||_1, A = Gamma' - Phi' H.
    """
    Phi, Gamma, Y = _check_data(Phi, Gamma, Y)
    weights = np.atleast_2d(np.asarray(weights, dtype=float))
    n_y, q = Y.shape[0], Gamma.shape[0]
    if weights.shape != (n_y, q):
        raise SchemaError(f"weights have shape {weights.shape}, expected {(n_y, q)}")
    if np.any(weights < 0):
        raise ArgumentError("weights must be non-negative")
    require_positive_int(max_cycles, "max_cycles")

    theta_bar, H = batch_ls(Phi, Y, Gamma)
    A = Gamma.T - Phi.T @ H
    eps_bar = Y.T - Phi.T @ theta_bar.T
    T = A.T @ A
    T = 0.5 * (T + T.T)
    rho = (A.T @ eps_bar).T

    z_hat = np.zeros((n_y, q))
    converged = True
    for i in range(n_y):
        eta = float(eps_bar[:, i] @ eps_bar[:, i])
        result = cyclic_minimize(T, eta, rho[i], np.zeros(q), weights[i], max_cycles, tol)
        if not result.converged:
            logger.warning(f"concentrated solve for row {i} stopped after {result.cycles} cycles")
            converged = False
        z_hat[i] = result.z

    theta_hat = theta_bar - z_hat @ H.T
    return ConcentratedSolution(theta_hat, z_hat, converged)


def majorizer_value(
    params: MlParams,
    point: MlParams,
    Phi: np.ndarray,
    Gamma: np.ndarray,
    Y: np.ndarray,
    Z: Optional[np.ndarray] = None,
) -> float:
    """V'(theta | theta~), or V'(theta | Z, theta~) when Z is given.

    Without Z the data term is ||y - Phi~ alpha||^2_{Lambda^-1}; with Z it is
    ||y - Phi~ alpha - Gamma~ vec(Z)||^2_{I (x) Sigma^-1} + ||vec(Z)||^2_{D^-1}.
    Both add the tangent plane of ln|Lambda| at theta~.
    """
    Phi, Gamma, Y = _check_data(Phi, Gamma, Y)
    _check_params(params, Phi, Gamma, Y)
    _check_params(point, Phi, Gamma, Y)
    tangent = _row_factors(point, Gamma)

    total = 0.0
    for i, row in enumerate(tangent):
        total += params.sigma[i] * row.trace + float(params.d[i] @ row.quad)
        total += row.logdet - point.sigma[i] * row.trace - float(point.d[i] @ row.quad)

    if Z is None:
        for i in range(params.n_y):
            own = _row_factor(Gamma, params.d[i], params.sigma[i])
            r = Y[i] - params.Theta[i] @ Phi
            total += float(r @ linalg.cho_solve(own.factor, r))
        return total

    Z = np.atleast_2d(np.asarray(Z, dtype=float))
    for i in range(params.n_y):
        r = Y[i] - params.Theta[i] @ Phi - Z[i] @ Gamma
        total += float(r @ r) / params.sigma[i]
        zero_var = params.d[i] == 0
        if np.any(Z[i, zero_var] != 0):
            return math.inf
        total += float(np.sum(Z[i, ~zero_var] ** 2 / params.d[i, ~zero_var]))
    return total


def mm_iterate(
    Phi: np.ndarray,
    Gamma: np.ndarray,
    Y: np.ndarray,
    k_max: int = DEFAULT_MM_ITERS,
    tol: float = DEFAULT_MM_TOL,
    init: Optional[MlParams] = None,
    solve_tol: float = DEFAULT_SOLVE_TOL,
) -> List[MmIterate]:
    """Majorization-minimization from init (default {0, 0, I}).

    Stops after k_max steps or once |V(theta_{k+1}) - V(theta_k)| < tol |V(theta_k)|.
    """
    Phi, Gamma, Y = _check_data(Phi, Gamma, Y)
    require_positive_int(k_max, "k_max")
    n_y, p, q = Y.shape[0], Phi.shape[0], Gamma.shape[0]
    params = MlParams.initial(n_y, p, q) if init is None else init
    _check_params(params, Phi, Gamma, Y)

    cost = cost_V(params, Phi, Gamma, Y)
    history = [MmIterate(0, params, params.Theta.copy(), np.zeros((n_y, q)), cost)]

    for k in range(1, k_max + 1):
        weights = weights_full(params, Gamma)
        theta_hat, z_hat, converged = solve_concentrated(weights, Phi, Gamma, Y, tol=solve_tol)
        params = nuisance_update(theta_hat, z_hat, params, Phi, Gamma, Y)
        new_cost = cost_V(params, Phi, Gamma, Y)
        history.append(MmIterate(k, params, theta_hat, z_hat, new_cost, converged))
        logger.debug(f"MM step {k}: V = {new_cost:.10g}, nonzero Z {np.count_nonzero(z_hat)}")

        if abs(new_cost - cost) < tol * abs(cost):
            logger.info(f"MM converged after {k} step(s), V = {new_cost:.6g}")
            break
        cost = new_cost

    return history
