"""
Regressor construction: the nominal regressor phi(t) and the basis vector
gamma(t) evaluated at phi(t).

phi(t) = [y(t-1)' ... y(t-n_a)'  u(t-1)' ... u(t-n_b)'  1]'

Samples before t = 1 are taken as zero. Time indices passed to this module
are 1-based, column t-1 of a Dataset holds sample t.
"""

import logging
from dataclasses import dataclass, replace
from functools import reduce
from typing import Callable, Dict, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from ..data.dataset import Dataset
from ..errors import ArgumentError
from ..utils.validators import require_positive_int

logger = logging.getLogger(__name__)

DEFAULT_BOUND_MARGIN = 1.2
BOUND_FLOOR = 1e-6

# Dense q x q accumulators are kept by the recursive solver
MAX_BASIS_SIZE = 4096


def laplace_basis(phi: np.ndarray, ell: np.ndarray, M: int) -> np.ndarray:
    """Tensor-product Laplace eigenfunctions on the box [-ell, ell].

    phi is (p-1) x N (the regressor without its constant entry). Returns the
    q x N matrix, q = M**(p-1), multi-indices in lexicographic order with the
    last index varying fastest.
    """
    phi = np.atleast_2d(np.asarray(phi, dtype=float))
    n_dims, n_cols = phi.shape
    if n_dims == 0:
        return np.ones((1, n_cols))

    ell = np.asarray(ell, dtype=float).reshape(-1, 1)
    k = np.arange(1, M + 1, dtype=float).reshape(1, -1, 1)
    # tables[i, k-1, t] = sin(pi k (phi_i + l_i) / (2 l_i)) / sqrt(l_i)
    scaled = ((phi + ell) / (2.0 * ell))[:, None, :]
    tables = np.sin(np.pi * k * scaled) / np.sqrt(ell)[:, :, None]

    def tensor(acc: np.ndarray, table: np.ndarray) -> np.ndarray:
        return (acc[:, None, :] * table[None, :, :]).reshape(-1, n_cols)

    return reduce(tensor, tables[1:], tables[0])


BasisFunction = Callable[[np.ndarray, np.ndarray, int], np.ndarray]

BASIS_FUNCTIONS: Dict[str, BasisFunction] = {
    "laplace": laplace_basis,
}


@dataclass(frozen=True)
class RegressorConfig:
    """Lag orders, channel counts and basis resolution.

    p = n_y*n_a + n_u*n_b + 1, q = M**(p-1). ell holds one positive
    boundary per non-constant entry of phi (length p-1) and may be left unset
    until estimate_bounds has seen training data.
    """

    n_a: int
    n_b: int
    n_u: int
    n_y: int
    M: int
    ell: Optional[Tuple[float, ...]] = None
    basis: str = "laplace"

    def __post_init__(self):
        for name in ("n_a", "n_b", "n_u"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 0:
                raise ArgumentError(f"{name} must be a non-negative integer, got {value!r}")
        require_positive_int(self.n_y, "n_y")
        require_positive_int(self.M, "M")
        if self.basis not in BASIS_FUNCTIONS:
            raise ArgumentError(
                f"Unknown basis: {self.basis}. Valid: {', '.join(sorted(BASIS_FUNCTIONS))}"
            )
        if self.q > MAX_BASIS_SIZE:
            raise ArgumentError(
                f"basis size q = M^(p-1) = {self.M}^{self.p - 1} = {self.q} "
                f"exceeds the supported maximum {MAX_BASIS_SIZE}"
            )
        if self.ell is not None:
            ell = tuple(float(v) for v in np.ravel(self.ell))
            if len(ell) != self.p - 1:
                raise ArgumentError(f"ell must have length p-1 = {self.p - 1}, got {len(ell)}")
            if not all(np.isfinite(v) and v > 0 for v in ell):
                raise ArgumentError(f"all boundaries ell_i must be positive, got {ell}")
            object.__setattr__(self, "ell", ell)

    @property
    def p(self) -> int:
        return self.n_y * self.n_a + self.n_u * self.n_b + 1

    @property
    def q(self) -> int:
        return self.M ** (self.p - 1)

    @property
    def warmup(self) -> int:
        """Samples whose regressor still contains pre-sample zeros"""
        return max(self.n_a, self.n_b)

    def with_bounds(self, ell: Sequence[float]) -> "RegressorConfig":
        return replace(self, ell=tuple(float(v) for v in ell))

    def require_bounds(self) -> np.ndarray:
        if self.ell is None:
            raise ArgumentError("basis boundaries ell are not set; run estimate_bounds first")
        return np.asarray(self.ell, dtype=float)

    def check_dataset(self, data: Dataset):
        if data.n_u != self.n_u or data.n_y != self.n_y:
            raise ArgumentError(
                f"dataset has n_u={data.n_u}, n_y={data.n_y} but the regressor "
                f"config expects n_u={self.n_u}, n_y={self.n_y}"
            )

    def multi_index(self, j: int) -> Tuple[int, ...]:
        """1-based basis multi-index (k_1..k_{p-1}) of flattened position j (0-based)"""
        if self.p == 1:
            return ()
        shape = (self.M,) * (self.p - 1)
        return tuple(int(k) + 1 for k in np.unravel_index(j, shape))


def stack_regressor(
    config: RegressorConfig, outputs: np.ndarray, inputs: np.ndarray, t: int
) -> np.ndarray:
    """phi(t) from output/input histories (channels x samples), zero before t=1"""
    parts = []
    for lag in range(1, config.n_a + 1):
        s = t - lag
        parts.append(outputs[:, s - 1] if s >= 1 else np.zeros(config.n_y))
    for lag in range(1, config.n_b + 1):
        s = t - lag
        parts.append(inputs[:, s - 1] if s >= 1 else np.zeros(config.n_u))
    parts.append(np.ones(1))
    return np.concatenate(parts)


def build_phi(config: RegressorConfig, data: Dataset, t: int) -> np.ndarray:
    """Nominal regressor phi(t) for 1 <= t <= N+1"""
    config.check_dataset(data)
    if not 1 <= t <= data.n_samples + 1:
        raise ArgumentError(f"t must lie in 1..{data.n_samples + 1}, got {t}")
    return stack_regressor(config, data.outputs, data.inputs, t)


class BasisVector(NamedTuple):
    """gamma(phi) with a flag for regressors outside the basis box"""

    gamma: np.ndarray
    out_of_bounds: bool


def evaluate_gamma(config: RegressorConfig, phi: np.ndarray) -> BasisVector:
    """Basis vector gamma evaluated at phi (the trailing constant is excluded).

    Regressors outside [-ell, ell] are still evaluated; the basis is not
    fitted there, so the flag is set and the caller decides how to report it.
    """
    phi = np.asarray(phi, dtype=float)
    if phi.shape != (config.p,):
        raise ArgumentError(f"phi must have length p = {config.p}, got shape {phi.shape}")
    ell = config.require_bounds()
    basis = BASIS_FUNCTIONS[config.basis]
    outside = bool(np.any(np.abs(phi[:-1]) > ell))
    return BasisVector(basis(phi[:-1, None], ell, config.M)[:, 0], outside)


def build_gamma(config: RegressorConfig, phi: np.ndarray) -> np.ndarray:
    """gamma(phi) only; the out-of-bounds check is left to the caller (see evaluate_gamma)"""
    return evaluate_gamma(config, phi).gamma


def out_of_bounds(config: RegressorConfig, phi: np.ndarray) -> bool:
    """True if any |phi_i| exceeds its boundary ell_i"""
    ell = config.require_bounds()
    return bool(np.any(np.abs(np.asarray(phi, dtype=float)[:-1]) > ell))


def build_phi_matrix(config: RegressorConfig, data: Dataset) -> np.ndarray:
    """Phi = [phi(1) ... phi(N)], p x N"""
    config.check_dataset(data)
    n = data.n_samples
    blocks = []
    for source, lags in ((data.outputs, config.n_a), (data.inputs, config.n_b)):
        for lag in range(1, lags + 1):
            shifted = np.zeros_like(source)
            if lag < n:
                shifted[:, lag:] = source[:, : n - lag]
            blocks.append(shifted)
    blocks.append(np.ones((1, n)))
    return np.vstack(blocks)


def build_regressors(config: RegressorConfig, data: Dataset) -> Tuple[np.ndarray, np.ndarray]:
    """Batch regression matrices (Phi p x N, Gamma q x N)"""
    phi = build_phi_matrix(config, data)
    ell = config.require_bounds()
    outside = np.abs(phi[:-1]) > ell[:, None]
    if outside.any():
        logger.warning(
            f"{int(outside.any(axis=0).sum())} of {data.n_samples} regressors lie outside "
            f"the basis box"
        )
    gamma = BASIS_FUNCTIONS[config.basis](phi[:-1], ell, config.M)
    return phi, gamma


def estimate_bounds(
    data: Dataset, config: RegressorConfig, margin: float = DEFAULT_BOUND_MARGIN
) -> np.ndarray:
    """ell_i = margin * max_t |phi_i(t)| over the record, floored at BOUND_FLOOR"""
    if not margin >= 1.0:
        raise ArgumentError(f"margin must be >= 1, got {margin}")
    phi = build_phi_matrix(config, data)
    ell = margin * np.max(np.abs(phi[:-1]), axis=1)
    floored = ell < BOUND_FLOOR
    if floored.any():
        logger.info(f"{int(floored.sum())} constant-zero regressor channel(s) floored")
    return np.maximum(ell, BOUND_FLOOR)
