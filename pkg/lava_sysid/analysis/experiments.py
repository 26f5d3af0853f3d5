"""
Synthetic saturation benchmark and the Monte Carlo amplitude sweep
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from ..data.dataset import Dataset
from ..data.signals import DEFAULT_BASE_PERIOD, SeedLike, generate_rs_inputs, make_rng
from ..errors import ArgumentError, DivergenceError, SchemaError
from ..estimators.lava import DEFAULT_CYCLES, LavaEstimator
from ..estimators.rls import DEFAULT_RLS_GAIN, ArxEstimator
from ..models.predictor import Model, simulate_free_run
from ..models.regressors import DEFAULT_BOUND_MARGIN, RegressorConfig, estimate_bounds
from ..utils.validators import require_positive, require_positive_int
from .metrics import rmse

logger = logging.getLogger(__name__)

DEFAULT_NOISE_VARIANCE = 2.5e-3
DEFAULT_SATURATION_LEVEL = 2.0
DEFAULT_AMPLITUDES = (0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 8.0)
ESTIMATORS = ("lava-r", "arx")
SWEEP_COLUMNS = ["estimator", "amplitude", "channel", "rmse"]


@dataclass(frozen=True)
class SaturationSystemSpec:
    """Two-state system with a saturated first state.

    x1(t+1) = sat_a(0.9 x1(t) + 0.1 u1(t))
    x2(t+1) = 0.08 x1(t) + 0.9 x2(t) + 0.6 u2(t)
    y(t)    = x(t) + e(t),  e ~ N(0, noise_variance I)

    saturation_level = inf gives the linear system.
    """

    noise_variance: float = DEFAULT_NOISE_VARIANCE
    saturation_level: float = DEFAULT_SATURATION_LEVEL
    seed: SeedLike = 0

    def __post_init__(self):
        if not (math.isfinite(self.noise_variance) and self.noise_variance >= 0):
            raise ArgumentError(f"noise_variance must be >= 0, got {self.noise_variance}")
        if not self.saturation_level > 0:
            raise ArgumentError(f"saturation_level must be positive, got {self.saturation_level}")
        if isinstance(self.seed, int) and self.seed < 0:
            raise ArgumentError(f"seed must be non-negative, got {self.seed}")


def simulate_saturation(
    spec: SaturationSystemSpec, inputs: np.ndarray, sample_period: float = 1.0
) -> Dataset:
    """Simulate from zero initial state; noise is drawn from spec.seed"""
    inputs = np.atleast_2d(np.asarray(inputs, dtype=float))
    if inputs.shape[0] != 2:
        raise SchemaError(f"the saturation system takes 2 input channels, got {inputs.shape[0]}")
    n = inputs.shape[1]
    a = spec.saturation_level

    states = np.zeros((2, n))
    x1 = x2 = 0.0
    for t in range(n):
        states[0, t] = x1
        states[1, t] = x2
        u1, u2 = inputs[0, t], inputs[1, t]
        x1, x2 = min(max(0.9 * x1 + 0.1 * u1, -a), a), 0.08 * x1 + 0.9 * x2 + 0.6 * u2

    noise = make_rng(spec.seed).normal(0.0, math.sqrt(spec.noise_variance), size=(2, n))
    return Dataset(inputs=inputs, outputs=states + noise, sample_period=sample_period)


@dataclass(frozen=True)
class SweepConfig:
    """Monte Carlo amplitude sweep on the saturation benchmark"""

    amplitudes: Tuple[float, ...] = DEFAULT_AMPLITUDES
    mc_runs: int = 20
    n_train: int = 1000
    n_val: int = 1000
    n_a: int = 1
    n_b: int = 1
    M: int = 4
    cycles: int = DEFAULT_CYCLES
    c: float = DEFAULT_RLS_GAIN
    margin: float = DEFAULT_BOUND_MARGIN
    base_period: int = DEFAULT_BASE_PERIOD
    seed: int = 0
    estimators: Tuple[str, ...] = ESTIMATORS
    system: SaturationSystemSpec = field(default_factory=SaturationSystemSpec)

    def __post_init__(self):
        if not self.amplitudes:
            raise ArgumentError("at least one amplitude is required")
        for amplitude in self.amplitudes:
            require_positive(amplitude, "amplitude")
        require_positive_int(self.mc_runs, "mc_runs")
        require_positive_int(self.n_train, "n_train")
        require_positive_int(self.n_val, "n_val")
        unknown = set(self.estimators) - set(ESTIMATORS)
        if unknown or not self.estimators:
            raise ArgumentError(
                f"Unknown estimator(s): {sorted(unknown)}. Valid: {', '.join(ESTIMATORS)}"
            )
        if self.seed < 0:
            raise ArgumentError(f"seed must be non-negative, got {self.seed}")


def generate_record(
    system: SaturationSystemSpec,
    amplitude: float,
    length: int,
    base_period: int,
    seeds: np.random.SeedSequence,
) -> Dataset:
    """RS(A) inputs on both channels and a noisy saturation response, from one seed"""
    input_seed, noise_seed = seeds.spawn(2)
    inputs = generate_rs_inputs(amplitude, 2, length, input_seed, base_period)
    return simulate_saturation(replace(system, seed=noise_seed), inputs)


def fit_estimators(config: SweepConfig, train: Dataset) -> Dict[str, Model]:
    """Fit every configured estimator on one training record"""
    regressors = RegressorConfig(n_a=config.n_a, n_b=config.n_b, n_u=2, n_y=2, M=config.M)
    regressors = regressors.with_bounds(estimate_bounds(train, regressors, config.margin))
    scale = float(np.max(np.abs(train.outputs)))
    provenance = {"data": train.fingerprint()}

    models: Dict[str, Model] = {}
    for name in config.estimators:
        if name == "arx":
            estimator = ArxEstimator(regressors, config.c)
        else:
            estimator = LavaEstimator(regressors, config.cycles, config.c)
        models[name] = estimator.fit(train).to_model(scale, provenance)
    return models


def _amplitude_rows(
    config: SweepConfig, amplitude: float, seeds: np.random.SeedSequence
) -> List[dict]:
    train_seed, *val_seeds = seeds.spawn(1 + config.mc_runs)
    system, period = config.system, config.base_period
    train = generate_record(system, amplitude, config.n_train, period, train_seed)
    models = fit_estimators(config, train)
    skip = max(config.n_a, config.n_b)

    simulated: Dict[str, List[np.ndarray]] = {name: [] for name in models}
    measured: List[np.ndarray] = []
    diverged = {name: 0 for name in models}
    for val_seed in val_seeds:
        val = generate_record(system, amplitude, config.n_val, period, val_seed)
        measured.append(val.outputs)
        for name, model in models.items():
            try:
                simulated[name].append(simulate_free_run(model, val))
            except DivergenceError as e:
                logger.warning(f"{name} at A={amplitude}: {e}")
                diverged[name] += 1
                simulated[name].append(np.full_like(val.outputs, np.nan))

    rows = []
    for name in models:
        if diverged[name]:
            values = np.full(2, np.nan)
        else:
            values = rmse(np.stack(simulated[name]), np.stack(measured), skip=skip)
        for channel, value in enumerate(values, start=1):
            rows.append(
                {"estimator": name, "amplitude": amplitude, "channel": channel, "rmse": value}
            )
    logger.info(
        f"A={amplitude}: "
        + ", ".join(f"{r['estimator']} ch{r['channel']} {r['rmse']:.4g}" for r in rows)
    )
    return rows


def _amplitude_task(args) -> List[dict]:
    return _amplitude_rows(*args)


def run_amplitude_sweep(config: SweepConfig, workers: int = 1) -> pd.DataFrame:
    """RMSE table (estimator x amplitude x channel) over Monte Carlo validation runs.

    Workers take whole amplitudes; the Monte Carlo runs of one amplitude share
    its trained models. Each amplitude owns a SeedSequence child of
    config.seed, so results do not depend on the worker count.
    """
    require_positive_int(workers, "workers")
    children = np.random.SeedSequence(config.seed).spawn(len(config.amplitudes))
    tasks = [(config, amplitude, seeds) for amplitude, seeds in zip(config.amplitudes, children)]
    logger.info(
        f"Sweeping {len(tasks)} amplitude(s), {config.mc_runs} Monte Carlo run(s) each, "
        f"{workers} worker(s)"
    )

    if workers == 1:
        results = [_amplitude_task(task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            results = list(executor.map(_amplitude_task, tasks))

    rows = [row for block in results for row in block]
    return pd.DataFrame(rows, columns=SWEEP_COLUMNS)


def write_sweep_csv(frame: pd.DataFrame, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
    return path


def summarize(frame: pd.DataFrame, channel: Optional[int] = None) -> pd.DataFrame:
    """Pivot to one row per amplitude and one column per estimator"""
    if channel is not None:
        frame = frame[frame["channel"] == channel]
    return frame.pivot_table(index="amplitude", columns="estimator", values="rmse", aggfunc="mean")
