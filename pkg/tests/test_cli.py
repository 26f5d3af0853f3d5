"""
Tests for the lava-sysid command line and model files
"""

import pytest
import sys
import os
import json

import numpy as np

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from lava_sysid import __version__
from lava_sysid.cli import run
from lava_sysid.commands import load_model, save_model
from lava_sysid.data.dataset import Dataset, save_csv
from lava_sysid.errors import SchemaError
from lava_sysid.models.predictor import Model, predict_series, simulate_free_run
from lava_sysid.models.regressors import RegressorConfig

SISO = RegressorConfig(n_a=1, n_b=1, n_u=1, n_y=1, M=2)


def _run(argv):
    """Run the CLI and return its exit status"""
    with pytest.raises(SystemExit) as exc:
        run([str(arg) for arg in argv])
    return exc.value.code


def _values(output):
    lines = output.strip().splitlines()
    start = lines.index("channel,value")
    return [float(line.split(",")[1]) for line in lines[start + 1 :]]


def _gen(path, samples=100, seed=3, amplitude=2.0):
    return _run(
        ["gen", "--amplitude", amplitude, "--samples", samples, "--seed", seed, "--out", path]
    )


def test_version(capsys):
    """Test --version output"""
    assert _run(["--version"]) == 0
    assert __version__ in capsys.readouterr().out


def test_missing_required_argument():
    """Test that gen without --out is a usage error"""
    assert _run(["gen", "--amplitude", "1", "--samples", "10"]) == 2


def test_gen_deterministic(tmp_path):
    """Test two gen runs with one seed produce identical files"""
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"

    assert _gen(first, samples=1000) == 0
    assert _gen(second, samples=1000) == 0

    assert first.read_bytes() == second.read_bytes()
    lines = first.read_text().splitlines()
    assert lines[0] == "u1,u2,y1,y2"
    assert len(lines) == 1001


def test_gen_rejects_negative_seed(tmp_path):
    """Test the argument error path of gen"""
    assert _gen(tmp_path / "a.csv", seed=-1) == 2


def test_fit_reports_dimensions(tmp_path, capsys):
    """Test the fit summary line on the saturation benchmark"""
    data, model = tmp_path / "train.csv", tmp_path / "model.json"
    _gen(data)

    code = _run(
        ["fit", "--data", data, "--na", 1, "--nb", 1, "--M", 4, "--cycles", 1, "--out", model]
    )

    assert code == 0
    out = capsys.readouterr().out
    assert "p=5 q=256 theta=10 z_capacity=512 nonzero=" in out
    loaded = load_model(model)
    assert loaded.provenance["solver"] == "lava-r"
    assert loaded.provenance["version"] == __version__
    assert loaded.capacity == 512


def test_fit_arx_and_mm_solvers(tmp_path):
    """Test the ARX solver and the batch MM path"""
    data = tmp_path / "train.csv"
    _gen(data, samples=80)
    common = ["fit", "--data", data, "--na", 1, "--nb", 1, "--M", 2]

    assert _run(common + ["--solver", "arx", "--out", tmp_path / "arx.json"]) == 0
    assert _run(common + ["--mm-iters", 1, "--out", tmp_path / "mm.json"]) == 0

    arx = load_model(tmp_path / "arx.json")
    mm = load_model(tmp_path / "mm.json")
    assert arx.provenance["solver"] == "arx-rls"
    assert arx.nonzero_count == 0
    assert mm.provenance["solver"] == "mm-batch"
    assert mm.provenance["steps"] == 1


def test_model_file_round_trip(tmp_path):
    """Test save/load keeps parameters and predictions bit-identical"""
    rng = np.random.default_rng(0)
    config = RegressorConfig(n_a=1, n_b=1, n_u=2, n_y=2, M=3, ell=(1.3, 0.7, 2.1, 0.9))
    z = np.where(rng.uniform(size=(2, 81)) < 0.2, rng.normal(size=(2, 81)), 0.0)
    model = Model.from_dense(rng.normal(size=(2, 5)), z, config, 1.7, {"solver": "lava-r"})
    data = Dataset(rng.uniform(-0.5, 0.5, size=(2, 30)), rng.uniform(-0.5, 0.5, size=(2, 30)))

    path = save_model(model, tmp_path / "m.json")
    loaded = load_model(path)

    assert np.array_equal(loaded.theta_hat, model.theta_hat)
    assert loaded.triplets() == model.triplets()
    assert loaded.config == model.config
    assert loaded.output_scale == 1.7
    assert np.array_equal(predict_series(loaded, data), predict_series(model, data))
    record = json.loads(path.read_text())
    assert record["schema_version"] == 1
    assert len(record["z_sparse"]) == model.nonzero_count


def test_load_model_rejects_bad_files(tmp_path):
    """Test missing, inconsistent and zero-entry model files"""
    model = Model.from_dense(np.array([[0.5, 1.0, 0.0]]), np.zeros((1, 4)), SISO)
    path = save_model(model, tmp_path / "m.json")
    record = json.loads(path.read_text())

    with pytest.raises(SchemaError):
        load_model(tmp_path / "missing.json")

    record["theta"] = [[0.5, 1.0]]
    path.write_text(json.dumps(record))
    with pytest.raises(SchemaError):
        load_model(path)

    record["theta"] = [[0.5, 1.0, 0.0]]
    record["ell"] = [1.0, 1.0]
    record["z_sparse"] = [{"i": 0, "j": 1, "value": 0.0}]
    path.write_text(json.dumps(record))
    with pytest.raises(SchemaError):
        load_model(path)


def test_simulate_perfect_model_fit(tmp_path, capsys):
    """Test FIT = 100 when the data come from the model itself"""
    rng = np.random.default_rng(1)
    model = Model.from_dense(np.array([[0.6, 1.0, 0.1]]), np.zeros((1, 4)), SISO)
    inputs = rng.uniform(-1, 1, size=(1, 200))
    outputs = simulate_free_run(model, Dataset(inputs, np.zeros((1, 200))))
    save_csv(Dataset(inputs, outputs), tmp_path / "val.csv")
    save_model(model, tmp_path / "m.json")

    code = _run(
        ["simulate", "--model", tmp_path / "m.json", "--data", tmp_path / "val.csv",
         "--out", tmp_path / "pred.csv"]
    )

    assert code == 0
    assert _values(capsys.readouterr().out) == pytest.approx([100.0], abs=1e-9)
    header = (tmp_path / "pred.csv").read_text().splitlines()[0]
    assert header == "u1,y1,yhat1"


def test_simulate_zero_model_fit_and_rmse(tmp_path, capsys):
    """Test FIT = 0 for the zero model on mean-centered data, and RMSE output"""
    rng = np.random.default_rng(2)
    outputs = rng.normal(size=(1, 100))
    outputs -= outputs[:, 1:].mean()
    save_csv(Dataset(rng.normal(size=(1, 100)), outputs), tmp_path / "val.csv")
    save_model(Model.from_dense(np.zeros((1, 3)), np.zeros((1, 4)), SISO), tmp_path / "m.json")
    base = ["simulate", "--model", tmp_path / "m.json", "--data", tmp_path / "val.csv"]

    assert _run(base + ["--out", tmp_path / "a.csv"]) == 0
    assert _values(capsys.readouterr().out) == pytest.approx([0.0], abs=1e-9)

    assert _run(base + ["--out", tmp_path / "b.csv", "--metric", "rmse", "--mode", "one-step"]) == 0
    expected = np.sqrt(np.mean(outputs[0, 1:] ** 2))
    assert _values(capsys.readouterr().out) == pytest.approx([expected], rel=1e-12)


def test_simulate_divergence_exit_code(tmp_path, capsys):
    """Test exit status 3 and the divergence sample on stdout"""
    save_csv(Dataset(np.zeros((1, 50)), np.zeros((1, 50))), tmp_path / "val.csv")
    save_model(
        Model.from_dense(np.array([[2.0, 0.0, 1.0]]), np.zeros((1, 4)), SISO, output_scale=1.0),
        tmp_path / "m.json",
    )

    code = _run(
        ["simulate", "--model", tmp_path / "m.json", "--data", tmp_path / "val.csv",
         "--out", tmp_path / "pred.csv"]
    )

    assert code == 3
    captured = capsys.readouterr()
    assert "diverged,20" in captured.out
    assert "error:" in captured.err


def test_simulate_wrong_columns(tmp_path):
    """Test that a data file with other channel counts exits with status 2"""
    save_csv(Dataset(np.zeros((2, 10)), np.zeros((1, 10))), tmp_path / "val.csv")
    save_model(Model.from_dense(np.zeros((1, 3)), np.zeros((1, 4)), SISO), tmp_path / "m.json")

    code = _run(
        ["simulate", "--model", tmp_path / "m.json", "--data", tmp_path / "val.csv",
         "--out", tmp_path / "pred.csv"]
    )

    assert code == 2


def test_inspect(tmp_path, capsys):
    """Test the model summary"""
    config = SISO.with_bounds((1.0, 1.0))
    model = Model.from_triplets(
        np.zeros((1, 3)), [(0, 1, 0.5)], config, provenance={"solver": "lava-r", "L": 5}
    )
    save_model(model, tmp_path / "m.json")

    assert _run(["inspect", "--model", tmp_path / "m.json"]) == 0

    out = capsys.readouterr().out
    assert "p=3 q=4" in out
    assert "theta=3 z_capacity=4" in out
    assert "nonzero=1 (25.0%)" in out
    assert "solver=lava-r" in out
    assert "L=5" in out


def test_sweep_reproducible(tmp_path):
    """Test that two sweeps with one seed write identical tables"""
    argv = ["sweep", "--amplitudes", "1", "--mc-runs", 1, "--train-samples", 40,
            "--val-samples", 30, "--M", 2, "--cycles", 1, "--seed", 4]

    assert _run(argv + ["--out", tmp_path / "a.csv"]) == 0
    assert _run(argv + ["--out", tmp_path / "b.csv"]) == 0

    first = (tmp_path / "a.csv").read_text()
    assert first == (tmp_path / "b.csv").read_text()
    assert first.splitlines()[0] == "estimator,amplitude,channel,rmse"
    assert len(first.splitlines()) == 5


def test_sweep_rejects_bad_amplitudes(tmp_path):
    """Test a malformed amplitude list"""
    assert _run(["sweep", "--amplitudes", "1,x", "--out", tmp_path / "a.csv"]) == 2


if __name__ == "__main__":
    pytest.main([__file__])
