"""
Excitation signals: PRBS from a maximal-length LFSR and the random-amplitude
sequence RS(A) built on top of it.

All randomness comes from numpy's counter-based Philox bit generator, so a
given seed yields the same sequence on every platform and numpy version that
ships Philox.
"""

import logging
from dataclasses import dataclass
from typing import Union

import numpy as np

from ..errors import ArgumentError
from ..utils.validators import require_positive, require_positive_int

logger = logging.getLogger(__name__)

DEFAULT_PRBS_ORDER = 9
DEFAULT_BASE_PERIOD = 5

# Feedback taps (1-indexed) of maximal-length Fibonacci LFSRs
PRBS_TAPS = {
    2: (2, 1),
    3: (3, 2),
    4: (4, 3),
    5: (5, 3),
    6: (6, 5),
    7: (7, 6),
    8: (8, 6, 5, 4),
    9: (9, 5),
    10: (10, 7),
    11: (11, 9),
    12: (12, 11, 10, 4),
    13: (13, 12, 11, 8),
    14: (14, 13, 12, 2),
    15: (15, 14),
    16: (16, 14, 13, 11),
}

SeedLike = Union[int, np.random.SeedSequence]


@dataclass(frozen=True)
class RsSignalSpec:
    """Parameters of an RS(A) excitation"""

    amplitude: float
    base_period: int
    length: int
    seed: int = 0
    prbs_order: int = DEFAULT_PRBS_ORDER

    def __post_init__(self):
        require_positive(self.amplitude, "amplitude")
        require_positive_int(self.base_period, "base_period")
        require_positive_int(self.length, "length")
        if self.seed < 0:
            raise ArgumentError(f"seed must be non-negative, got {self.seed}")
        if self.prbs_order not in PRBS_TAPS:
            raise ArgumentError(
                f"Unsupported PRBS order {self.prbs_order}. Supported: {sorted(PRBS_TAPS)}"
            )

    @property
    def n_intervals(self) -> int:
        return -(-self.length // self.base_period)


def make_rng(seed: SeedLike) -> np.random.Generator:
    """Philox generator for an integer seed or a spawned SeedSequence"""
    return np.random.Generator(np.random.Philox(seed))


def lfsr_bits(order: int, n_bits: int, state: int) -> np.ndarray:
    """Left-shift Fibonacci LFSR, MSB is the output bit, feedback into the LSB."""
    taps = PRBS_TAPS[order]
    mask = (1 << order) - 1
    state &= mask
    if state == 0:
        state = 1

    bits = np.empty(n_bits, dtype=np.uint8)
    for i in range(n_bits):
        bits[i] = (state >> (order - 1)) & 1
        fb = 0
        for tp in taps:
            fb ^= (state >> (tp - 1)) & 1
        state = ((state << 1) & mask) | fb
    return bits


def prbs_levels(order: int, n_levels: int, rng: np.random.Generator) -> np.ndarray:
    """PRBS levels in {-1, +1}, starting from a random nonzero register state"""
    state = int(rng.integers(1, 1 << order))
    return lfsr_bits(order, n_levels, state).astype(np.float64) * 2.0 - 1.0


def _rs_sequence(
    amplitude: float, base_period: int, length: int, order: int, rng: np.random.Generator
) -> np.ndarray:
    n_intervals = -(-length // base_period)
    levels = prbs_levels(order, n_intervals, rng)
    factors = rng.uniform(0.0, amplitude, size=n_intervals)
    return np.repeat(levels * factors, base_period)[:length]


def generate_rs(spec: RsSignalSpec) -> np.ndarray:
    """RS(A): a PRBS clocked once per base_period whose constant intervals are
    scaled by independent uniform factors on [0, A]. Values lie in [-A, A]."""
    return _rs_sequence(
        spec.amplitude, spec.base_period, spec.length, spec.prbs_order, make_rng(spec.seed)
    )


def generate_rs_inputs(
    amplitude: float,
    n_channels: int,
    length: int,
    seed: SeedLike,
    base_period: int = DEFAULT_BASE_PERIOD,
    prbs_order: int = DEFAULT_PRBS_ORDER,
) -> np.ndarray:
    """Independent RS(A) channels (n_channels x length) from one seed."""
    require_positive(amplitude, "amplitude")
    require_positive_int(n_channels, "n_channels")
    require_positive_int(length, "length")
    require_positive_int(base_period, "base_period")
    root = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    channels = [
        _rs_sequence(amplitude, base_period, length, prbs_order, make_rng(child))
        for child in root.spawn(n_channels)
    ]
    return np.vstack(channels)
