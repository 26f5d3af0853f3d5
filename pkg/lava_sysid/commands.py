"""
Command handlers for the lava-sysid CLI and the model file format.

Handlers return a process exit code: 0 success, 2 usage/schema, 3
numeric/divergence. Library errors are mapped here and nowhere else.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field, ValidationError, model_validator

from . import __version__
from .analysis.experiments import (
    SaturationSystemSpec,
    SweepConfig,
    generate_record,
    run_amplitude_sweep,
    summarize,
    write_sweep_csv,
)
from .analysis.metrics import fit_metric, rmse
from .data.dataset import Dataset, load_csv, save_csv
from .errors import ArgumentError, DivergenceError, LavaError, SchemaError
from .estimators.lava import LavaEstimator
from .estimators.mm_batch import mm_iterate
from .estimators.rls import ArxEstimator
from .models.predictor import Model, predict_series, simulate_free_run
from .models.regressors import RegressorConfig, build_regressors, estimate_bounds
from .utils.validators import parse_float_list, require_positive_int

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1


class ModelDims(BaseModel):
    n_u: int = Field(ge=0)
    n_y: int = Field(ge=1)
    n_a: int = Field(ge=0)
    n_b: int = Field(ge=0)
    M: int = Field(ge=1)
    p: int
    q: int


class ZEntry(BaseModel):
    i: int
    j: int
    value: float


class ModelFile(BaseModel):
    """JSON model file: dims, boundaries, dense Theta_hat, sparse Z_hat"""

    schema_version: int = SCHEMA_VERSION
    dims: ModelDims
    ell: Optional[List[float]] = None
    theta: List[List[float]]
    z_sparse: List[ZEntry] = Field(default_factory=list)
    output_scale: float = 1.0
    provenance: Dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="after")
    def check_consistency(self) -> "ModelFile":
        dims = self.dims
        if self.schema_version != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {self.schema_version}")
        p = dims.n_y * dims.n_a + dims.n_u * dims.n_b + 1
        if dims.p != p or dims.q != dims.M ** (p - 1):
            raise ValueError(f"dims p={dims.p}, q={dims.q} inconsistent with lags and M")
        if len(self.theta) != dims.n_y or any(len(row) != dims.p for row in self.theta):
            raise ValueError(f"theta must be {dims.n_y} rows of {dims.p} values")
        if self.ell is not None and len(self.ell) != dims.p - 1:
            raise ValueError(f"ell must have {dims.p - 1} entries")
        for entry in self.z_sparse:
            if not (0 <= entry.i < dims.n_y and 0 <= entry.j < dims.q):
                raise ValueError(f"z_sparse entry ({entry.i}, {entry.j}) out of bounds")
            if entry.value == 0:
                raise ValueError(f"z_sparse entry ({entry.i}, {entry.j}) is zero")
        return self


def model_to_file(model: Model) -> ModelFile:
    config = model.config
    return ModelFile(
        dims=ModelDims(
            n_u=config.n_u, n_y=config.n_y, n_a=config.n_a, n_b=config.n_b,
            M=config.M, p=config.p, q=config.q,
        ),
        ell=None if config.ell is None else list(config.ell),
        theta=model.theta_hat.tolist(),
        z_sparse=[ZEntry(i=i, j=j, value=v) for i, j, v in model.triplets()],
        output_scale=model.output_scale,
        provenance=model.provenance,
    )


def model_from_file(record: ModelFile) -> Model:
    dims = record.dims
    config = RegressorConfig(
        n_a=dims.n_a, n_b=dims.n_b, n_u=dims.n_u, n_y=dims.n_y, M=dims.M,
        ell=None if record.ell is None else tuple(record.ell),
    )
    return Model.from_triplets(
        np.array(record.theta, dtype=float),
        [(e.i, e.j, e.value) for e in record.z_sparse],
        config,
        output_scale=record.output_scale,
        provenance=record.provenance,
    )


def save_model(model: Model, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(model_to_file(model).model_dump_json(indent=2) + "\n")
    return path


def load_model(path) -> Model:
    path = Path(path)
    if not path.is_file():
        raise SchemaError(f"model file not found: {path}")
    try:
        record = ModelFile.model_validate_json(path.read_text())
    except ValidationError as e:
        raise SchemaError(f"{path}: invalid model file: {e}")
    return model_from_file(record)


def cmd_gen(args: argparse.Namespace) -> int:
    system = SaturationSystemSpec(
        noise_variance=args.noise_variance, saturation_level=args.saturation_level
    )
    require_positive_int(args.samples, "samples")
    if args.seed < 0:
        raise ArgumentError(f"seed must be non-negative, got {args.seed}")
    data = generate_record(
        system, args.amplitude, args.samples, args.base_period, np.random.SeedSequence(args.seed)
    )
    save_csv(data, args.out)
    logger.info(f"Wrote {data.n_samples} samples (A={args.amplitude}) to {args.out}")
    return 0


def _fit_model(args: argparse.Namespace, data: Dataset, config: RegressorConfig) -> Model:
    scale = float(np.max(np.abs(data.outputs)))
    provenance = {"data": data.fingerprint(), "version": __version__}
    if args.mm_iters > 0:
        phi, gamma = build_regressors(config, data)
        history = mm_iterate(phi, gamma, data.outputs, k_max=args.mm_iters)
        last = history[-1]
        provenance.update(solver="mm-batch", k_max=args.mm_iters, steps=last.k, cost=last.cost)
        return Model.from_dense(last.theta_hat, last.z_hat, config, scale, provenance)
    if args.solver == "arx":
        return ArxEstimator(config, args.c).fit(data).to_model(scale, provenance)
    return LavaEstimator(config, args.cycles, args.c).fit(data).to_model(scale, provenance)


def cmd_fit(args: argparse.Namespace) -> int:
    data = load_csv(args.data, args.n_u, args.n_y)
    config = RegressorConfig(n_a=args.na, n_b=args.nb, n_u=data.n_u, n_y=data.n_y, M=args.M)
    config = config.with_bounds(estimate_bounds(data, config, args.margin))
    model = _fit_model(args, data, config)
    save_model(model, args.out)
    print(
        f"p={config.p} q={config.q} theta={model.theta_hat.size} "
        f"z_capacity={model.capacity} nonzero={model.nonzero_count}"
    )
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    config = model.config
    data = load_csv(args.data, config.n_u, config.n_y)
    try:
        if args.mode == "one-step":
            predicted = predict_series(model, data)
        else:
            predicted = simulate_free_run(model, data)
    except DivergenceError as e:
        print(f"diverged,{e.sample}")
        raise

    extra = pd.DataFrame(predicted.T, columns=[f"yhat{k}" for k in range(1, config.n_y + 1)])
    save_csv(data, args.out, extra=extra)

    skip = config.warmup
    if args.metric == "fit":
        values = fit_metric(predicted, data.outputs, skip=skip)
    else:
        values = rmse(predicted, data.outputs, skip=skip)
    print("channel,value")
    for channel, value in enumerate(np.atleast_1d(values), start=1):
        print(f"{channel},{float(value)!r}")
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    config = SweepConfig(
        amplitudes=parse_float_list(args.amplitudes, "amplitudes"),
        mc_runs=args.mc_runs,
        n_train=args.train_samples,
        n_val=args.val_samples,
        M=args.M,
        cycles=args.cycles,
        seed=args.seed,
    )
    frame = run_amplitude_sweep(config, workers=args.workers)
    write_sweep_csv(frame, args.out)
    logger.info(f"Channel 1 RMSE by amplitude:\n{summarize(frame, channel=1)}")
    return 0


def cmd_inspect(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    config = model.config
    print(f"n_u={config.n_u} n_y={config.n_y} n_a={config.n_a} n_b={config.n_b} M={config.M}")
    print(f"p={config.p} q={config.q}")
    print(f"theta={model.theta_hat.size} z_capacity={model.capacity}")
    share = 100.0 * model.nonzero_count / model.capacity
    print(f"nonzero={model.nonzero_count} ({share:.1f}%)")
    for key, value in sorted(model.provenance.items()):
        print(f"{key}={value}")
    return 0


COMMANDS = {
    "gen": cmd_gen,
    "fit": cmd_fit,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "inspect": cmd_inspect,
}


def dispatch(args: argparse.Namespace) -> int:
    """Run a parsed command and map library errors to exit codes"""
    try:
        return COMMANDS[args.command](args)
    except LavaError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
