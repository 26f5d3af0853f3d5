"""
Multi-channel input/output records: CSV ingestion, emission and splitting
"""

import hashlib
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from ..errors import ArgumentError, ParseError, SchemaError
from ..utils.validators import require_positive

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

# 17 significant digits round-trip every IEEE double exactly
CSV_FLOAT_FORMAT = "%.17g"


@dataclass(frozen=True, eq=False)
class Dataset:
    """Input/output time series, one column per sample.

    inputs is n_u x N, outputs is n_y x N. sample_period is metadata only;
    every estimator in this package is discrete-time.
    """

    inputs: np.ndarray
    outputs: np.ndarray
    sample_period: float = 1.0
    names: Tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        inputs = np.array(self.inputs, dtype=float, ndmin=2)
        outputs = np.array(self.outputs, dtype=float, ndmin=2)
        if inputs.ndim != 2 or outputs.ndim != 2:
            raise SchemaError("inputs and outputs must be 2-D (channels x samples)")
        if inputs.shape[1] != outputs.shape[1]:
            raise SchemaError(
                f"inputs have {inputs.shape[1]} samples but outputs have {outputs.shape[1]}"
            )
        if outputs.shape[1] < 1:
            raise SchemaError("dataset must hold at least one sample")
        if not (np.all(np.isfinite(inputs)) and np.all(np.isfinite(outputs))):
            raise SchemaError("dataset contains NaN or Inf values")
        require_positive(self.sample_period, "sample_period")

        inputs.setflags(write=False)
        outputs.setflags(write=False)
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "outputs", outputs)
        if not self.names:
            object.__setattr__(self, "names", default_column_names(*self.dims))

    @property
    def n_u(self) -> int:
        return self.inputs.shape[0]

    @property
    def n_y(self) -> int:
        return self.outputs.shape[0]

    @property
    def n_samples(self) -> int:
        return self.outputs.shape[1]

    @property
    def dims(self) -> Tuple[int, int]:
        return self.n_u, self.n_y

    def fingerprint(self) -> str:
        """SHA-256 over the raw sample values"""
        digest = hashlib.sha256()
        digest.update(np.ascontiguousarray(self.inputs).tobytes())
        digest.update(np.ascontiguousarray(self.outputs).tobytes())
        return digest.hexdigest()

    def to_frame(self) -> pd.DataFrame:
        """One row per sample, inputs first then outputs"""
        values = np.vstack([self.inputs, self.outputs]).T
        return pd.DataFrame(values, columns=list(self.names))


def default_column_names(n_u: int, n_y: int) -> Tuple[str, ...]:
    return tuple([f"u{k}" for k in range(1, n_u + 1)] + [f"y{k}" for k in range(1, n_y + 1)])


def load_csv(path: PathLike, n_u: int, n_y: int, sample_period: float = 1.0) -> Dataset:
    """Load a dataset from CSV.

    The header names n_u input columns followed by n_y output columns. Row
    numbers in error messages count data rows from 1 (the header is row 0).
    """
    if n_u < 0 or n_y < 1:
        raise ArgumentError(f"need n_u >= 0 and n_y >= 1, got n_u={n_u}, n_y={n_y}")
    path = Path(path)
    if not path.is_file():
        raise ArgumentError(f"data file not found: {path}")

    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, skipinitialspace=True)
    except pd.errors.ParserError as e:
        raise SchemaError(f"{path}: {e}")
    except pd.errors.EmptyDataError:
        raise SchemaError(f"{path}: file is empty")

    expected = n_u + n_y
    if frame.shape[1] != expected:
        raise SchemaError(
            f"{path}: header has {frame.shape[1]} columns, expected {expected} "
            f"({n_u} inputs + {n_y} outputs)"
        )
    if frame.shape[0] == 0:
        raise SchemaError(f"{path}: no data rows")

    columns: List[np.ndarray] = []
    for name in frame.columns:
        raw = frame[name]
        try:
            # float() per field parses the shortest repr exactly
            numeric = raw.to_numpy(dtype=object).astype(float)
        except ValueError:
            numeric = pd.to_numeric(raw, errors="coerce").to_numpy(dtype=float)
        bad = ~np.isfinite(numeric)
        if bad.any():
            row = int(np.flatnonzero(bad)[0])
            raise ParseError(
                f"{path}: row {row + 1}, column {name!r}: cannot parse {raw.iloc[row]!r} "
                f"as a finite number",
                row=row + 1,
            )
        columns.append(numeric)

    values = np.vstack(columns)
    logger.debug(f"Loaded {values.shape[1]} samples from {path}")
    return Dataset(
        inputs=values[:n_u],
        outputs=values[n_u:],
        sample_period=sample_period,
        names=tuple(str(c) for c in frame.columns),
    )


def save_csv(data: Dataset, path: PathLike, extra: Optional[pd.DataFrame] = None) -> Path:
    """Write a dataset (optionally with extra columns appended) as CSV"""
    frame = data.to_frame()
    if extra is not None:
        frame = pd.concat([frame, extra.reset_index(drop=True)], axis=1)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")
    return path


def split(data: Dataset, boundary: int) -> Tuple[Dataset, Dataset]:
    """Split into samples 1..boundary and boundary+1..N"""
    if isinstance(boundary, bool) or not isinstance(boundary, (int, np.integer)):
        raise ArgumentError(f"boundary must be an integer, got {boundary!r}")
    if not 1 <= boundary < data.n_samples:
        raise ArgumentError(
            f"boundary must satisfy 1 <= boundary < N={data.n_samples}, got {boundary}"
        )
    first = Dataset(
        data.inputs[:, :boundary], data.outputs[:, :boundary], data.sample_period, data.names
    )
    second = Dataset(
        data.inputs[:, boundary:], data.outputs[:, boundary:], data.sample_period, data.names
    )
    return first, second
