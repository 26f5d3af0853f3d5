"""
Tests for dataset ingestion, emission and splitting
"""

import pytest
import sys
import os

import numpy as np

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from lava_sysid.data.dataset import Dataset, load_csv, save_csv, split
from lava_sysid.errors import ArgumentError, ParseError, SchemaError


def _random_dataset(n_u=2, n_y=2, n=50, seed=0):
    rng = np.random.default_rng(seed)
    return Dataset(rng.normal(size=(n_u, n)), rng.normal(size=(n_y, n)) * 1e3)


def test_load_csv_three_rows(tmp_path):
    """Test a 3-row file with one input and two outputs"""
    path = tmp_path / "d.csv"
    path.write_text("u1,y1,y2\n1,2,3\n4,5,6\n7,8,9\n")

    data = load_csv(path, n_u=1, n_y=2)

    assert data.n_samples == 3
    assert data.dims == (1, 2)
    np.testing.assert_array_equal(data.inputs, [[1, 4, 7]])
    np.testing.assert_array_equal(data.outputs, [[2, 5, 8], [3, 6, 9]])
    assert data.names == ("u1", "y1", "y2")


def test_load_csv_malformed_field_names_row(tmp_path):
    """Test that a non-numeric field raises a parse error naming the row"""
    path = tmp_path / "d.csv"
    path.write_text("u1,y1\n1,2\n3,abc\n5,6\n")

    with pytest.raises(ParseError) as exc:
        load_csv(path, n_u=1, n_y=1)

    assert exc.value.row == 2
    assert "row 2" in str(exc.value)


def test_load_csv_column_mismatch(tmp_path):
    """Test that a header with the wrong column count is a schema error"""
    path = tmp_path / "d.csv"
    path.write_text("u1,y1,y2\n1,2,3\n")

    with pytest.raises(SchemaError):
        load_csv(path, n_u=1, n_y=1)


def test_load_csv_missing_file(tmp_path):
    """Test that a missing file is an argument error"""
    with pytest.raises(ArgumentError):
        load_csv(tmp_path / "nope.csv", n_u=1, n_y=1)


def test_csv_round_trip_bit_identical(tmp_path):
    """Test write-then-load returns exactly the same values"""
    data = _random_dataset()
    path = save_csv(data, tmp_path / "out" / "d.csv")

    loaded = load_csv(path, n_u=2, n_y=2)

    assert np.array_equal(loaded.inputs, data.inputs)
    assert np.array_equal(loaded.outputs, data.outputs)
    assert loaded.fingerprint() == data.fingerprint()
    assert path.read_text().splitlines()[0] == "u1,u2,y1,y2"
    assert b"\r\n" not in path.read_bytes()


def test_dataset_rejects_bad_values():
    """Test Dataset invariants"""
    with pytest.raises(SchemaError):
        Dataset(np.zeros((1, 3)), np.zeros((1, 4)))
    with pytest.raises(SchemaError):
        Dataset(np.zeros((1, 2)), np.array([[0.0, np.inf]]))
    with pytest.raises(ArgumentError):
        Dataset(np.zeros((1, 2)), np.zeros((1, 2)), sample_period=0.0)


def test_dataset_is_read_only():
    """Test that the stored arrays cannot be modified"""
    data = _random_dataset()
    with pytest.raises(ValueError):
        data.outputs[0, 0] = 1.0


def test_split_equal_halves():
    """Test the 1250/1250 identification/validation split"""
    data = _random_dataset(n=2500)

    first, second = split(data, 1250)

    assert first.n_samples == 1250
    assert second.n_samples == 1250
    np.testing.assert_array_equal(
        np.hstack([first.outputs, second.outputs]), data.outputs
    )
    np.testing.assert_array_equal(np.hstack([first.inputs, second.inputs]), data.inputs)


def test_split_minimal_and_errors():
    """Test the smallest split and out-of-range boundaries"""
    data = _random_dataset(n=2)

    first, second = split(data, 1)
    assert (first.n_samples, second.n_samples) == (1, 1)

    for boundary in (0, 2, 5):
        with pytest.raises(ArgumentError):
            split(data, boundary)
    with pytest.raises(ArgumentError):
        split(data, 1.0)


if __name__ == "__main__":
    pytest.main([__file__])
