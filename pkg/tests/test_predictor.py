"""
Tests for the refined predictor and free-run simulation
"""

import pytest
import sys
import os

import numpy as np

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from lava_sysid.data.dataset import Dataset
from lava_sysid.errors import DivergenceError, SchemaError
from lava_sysid.models.predictor import (
    Model,
    predict_one_step,
    predict_series,
    simulate_free_run,
)
from lava_sysid.models.regressors import RegressorConfig, build_phi_matrix


SISO = RegressorConfig(n_a=1, n_b=1, n_u=1, n_y=1, M=2)
AUTONOMOUS = RegressorConfig(n_a=1, n_b=0, n_u=1, n_y=1, M=2, ell=(1.0,))


def _siso_model(theta, **kwargs):
    return Model.from_dense(np.array([theta], dtype=float), np.zeros((1, 4)), SISO, **kwargs)


def test_model_shape_validation():
    """Test Theta_hat and Z_hat shape checks"""
    with pytest.raises(SchemaError):
        Model.from_dense(np.zeros((1, 2)), np.zeros((1, 4)), SISO)
    with pytest.raises(SchemaError):
        Model.from_dense(np.zeros((1, 3)), np.zeros((1, 3)), SISO)


def test_model_nonzero_z_needs_bounds():
    """Test that a nonzero Z_hat without ell is rejected"""
    z = np.zeros((1, 4))
    z[0, 2] = 0.1

    with pytest.raises(SchemaError):
        Model.from_dense(np.zeros((1, 3)), z, SISO)
    model = Model.from_dense(np.zeros((1, 3)), z, SISO.with_bounds((1.0, 1.0)))
    assert model.nonzero_count == 1


def test_model_eliminates_explicit_zeros():
    """Test that stored zeros do not count as nonzero entries"""
    config = SISO.with_bounds((1.0, 1.0))
    model = Model.from_triplets(np.zeros((1, 3)), [(0, 1, 0.0), (0, 3, 0.5)], config)

    assert model.nonzero_count == 1
    assert model.capacity == 4
    assert model.triplets() == [(0, 3, 0.5)]


def test_model_triplets_row_major():
    """Test triplet order and the dense view"""
    config = RegressorConfig(n_a=1, n_b=1, n_u=1, n_y=2, M=2, ell=(1.0, 1.0, 1.0))
    entries = [(1, 0, -0.5), (0, 7, 0.25), (0, 2, 1.5)]

    model = Model.from_triplets(np.zeros((2, 4)), entries, config)

    assert model.triplets() == [(0, 2, 1.5), (0, 7, 0.25), (1, 0, -0.5)]
    dense = model.z_dense()
    assert dense.shape == (2, 8)
    assert dense[0, 7] == 0.25
    with pytest.raises(SchemaError):
        Model.from_triplets(np.zeros((2, 4)), [(2, 0, 1.0)], config)


def test_model_is_read_only():
    """Test that Theta_hat cannot be modified in place"""
    model = _siso_model([0.5, 1.0, 0.0])

    with pytest.raises(ValueError):
        model.theta_hat[0, 0] = 1.0


def test_linear_model_prediction_matches_arx():
    """Test that Z_hat = 0 predicts Theta_hat phi"""
    rng = np.random.default_rng(0)
    data = Dataset(rng.normal(size=(1, 30)), rng.normal(size=(1, 30)))
    model = _siso_model([0.7, -0.3, 0.1])

    series = predict_series(model, data)

    np.testing.assert_allclose(series, model.theta_hat @ build_phi_matrix(SISO, data), atol=1e-14)
    for t in (1, 2, 17, 30):
        np.testing.assert_allclose(predict_one_step(model, data, t), series[:, t - 1], atol=1e-14)


def test_zero_model_predicts_zero():
    """Test the all-zero model"""
    rng = np.random.default_rng(1)
    data = Dataset(rng.normal(size=(1, 10)), rng.normal(size=(1, 10)))
    model = _siso_model([0.0, 0.0, 0.0])

    np.testing.assert_array_equal(predict_series(model, data), 0.0)
    np.testing.assert_array_equal(simulate_free_run(model, data), 0.0)


def test_prediction_with_latent_terms():
    """Test a hand-built p=2, q=2 model"""
    z = np.array([[0.2, -0.1]])
    model = Model.from_dense(np.array([[0.5, 0.0]]), z, AUTONOMOUS)
    data = Dataset(np.zeros((1, 3)), np.array([[0.5, 0.2, 0.0]]))

    gamma = np.array([np.sin(np.pi * 1.5 / 2), np.sin(2 * np.pi * 1.5 / 2)])
    expected = 0.25 + z[0] @ gamma

    np.testing.assert_allclose(predict_one_step(model, data, 2), [expected], atol=1e-14)
    np.testing.assert_allclose(predict_series(model, data)[:, 1], [expected], atol=1e-14)


def test_predict_series_matches_loop():
    """Test the batch predictor against per-sample predictions with latent terms"""
    rng = np.random.default_rng(2)
    config = RegressorConfig(n_a=1, n_b=1, n_u=2, n_y=2, M=3, ell=(3.0, 3.0, 3.0, 3.0))
    z = np.where(rng.uniform(size=(2, 81)) < 0.1, rng.normal(size=(2, 81)), 0.0)
    model = Model.from_dense(rng.normal(size=(2, 5)), z, config)
    data = Dataset(rng.uniform(-1, 1, size=(2, 25)), rng.uniform(-1, 1, size=(2, 25)))

    series = predict_series(model, data)

    for t in range(1, 26):
        np.testing.assert_allclose(series[:, t - 1], predict_one_step(model, data, t), atol=1e-12)


def test_free_run_geometric_recursion():
    """Test y(t) = 0.5 y(t-1) + b0 u(t-1) with unit input"""
    b0 = 0.8
    model = _siso_model([0.5, b0, 0.0])
    data = Dataset(np.ones((1, 20)), np.zeros((1, 20)))

    simulated = simulate_free_run(model, data)

    t = np.arange(1, 21)
    np.testing.assert_allclose(simulated[0], 2 * b0 * (1 - 0.5 ** (t - 1)), atol=1e-14)


def test_free_run_first_sample_equals_one_step():
    """Test that with no history the first simulated sample is the one-step prediction"""
    rng = np.random.default_rng(3)
    data = Dataset(rng.normal(size=(1, 5)), rng.normal(size=(1, 5)))
    model = _siso_model([0.4, 1.2, -0.3])

    np.testing.assert_array_equal(
        simulate_free_run(model, data)[:, 0], predict_one_step(model, data, 1)
    )


def test_free_run_uses_simulated_outputs():
    """Test that measured outputs do not enter the simulation"""
    rng = np.random.default_rng(4)
    inputs = rng.normal(size=(1, 15))
    model = _siso_model([0.6, 1.0, 0.05])

    first = simulate_free_run(model, Dataset(inputs, rng.normal(size=(1, 15))))
    second = simulate_free_run(model, Dataset(inputs, rng.normal(size=(1, 15))))

    np.testing.assert_array_equal(first, second)


def test_free_run_linear_in_input():
    """Test superposition for a linear model without intercept"""
    rng = np.random.default_rng(5)
    inputs = rng.normal(size=(1, 40))
    model = _siso_model([0.9, 0.3, 0.0])
    outputs = np.zeros((1, 40))

    single = simulate_free_run(model, Dataset(inputs, outputs))
    double = simulate_free_run(model, Dataset(2 * inputs, outputs))

    np.testing.assert_allclose(double, 2 * single, rtol=1e-12, atol=1e-14)


def test_free_run_divergence_reports_sample():
    """Test y(t) = 2 y(t-1) + 1 exceeds 1e6 at sample 20"""
    model = _siso_model([2.0, 0.0, 1.0], output_scale=1.0)
    data = Dataset(np.zeros((1, 50)), np.zeros((1, 50)))

    with pytest.raises(DivergenceError) as exc:
        simulate_free_run(model, data)

    assert exc.value.sample == 20
    assert exc.value.exit_code == 3


def test_free_run_warns_outside_basis_box(caplog):
    """Test the single warning for regressors beyond ell"""
    config = SISO.with_bounds((0.1, 0.1))
    z = np.zeros((1, 4))
    z[0, 0] = 0.01
    model = Model.from_dense(np.array([[0.0, 1.0, 0.0]]), z, config)
    data = Dataset(np.full((1, 10), 0.5), np.zeros((1, 10)))

    with caplog.at_level("WARNING"):
        simulate_free_run(model, data)

    assert caplog.text.count("left the basis box") == 1


if __name__ == "__main__":
    pytest.main([__file__])
