"""
Tests for PRBS and RS(A) excitation signals
"""

import pytest
import sys
import os

import numpy as np
from scipy import stats

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from lava_sysid.data.signals import (
    RsSignalSpec,
    generate_rs,
    generate_rs_inputs,
    lfsr_bits,
)
from lava_sysid.errors import ArgumentError


def test_rs_range_and_run_length():
    """Test values in [-A, A], constant over each base period"""
    signal = generate_rs(RsSignalSpec(amplitude=1.0, base_period=5, length=100, seed=3))

    assert signal.shape == (100,)
    assert np.all(np.abs(signal) <= 1.0)
    runs = signal.reshape(20, 5)
    assert np.all(runs == runs[:, :1])


def test_rs_sweep_amplitude():
    """Test the range for a sweep amplitude of 2.5"""
    signal = generate_rs(RsSignalSpec(amplitude=2.5, base_period=5, length=1000, seed=1))

    assert np.all(np.abs(signal) <= 2.5)
    assert np.max(np.abs(signal)) > 1.0


def test_rs_truncates_last_interval():
    """Test a length that is not a multiple of the base period"""
    spec = RsSignalSpec(amplitude=1.0, base_period=4, length=10)

    assert spec.n_intervals == 3
    assert generate_rs(spec).shape == (10,)


def test_rs_deterministic():
    """Test that the same seed gives the same sequence"""
    spec = RsSignalSpec(amplitude=2.0, base_period=5, length=500, seed=42)

    np.testing.assert_array_equal(generate_rs(spec), generate_rs(spec))
    other = RsSignalSpec(amplitude=2.0, base_period=5, length=500, seed=43)
    assert not np.array_equal(generate_rs(spec), generate_rs(other))


def test_rs_interval_amplitudes_uniform():
    """Test that interval magnitudes are uniform on [0, A] (KS test)"""
    amplitude = 3.0
    spec = RsSignalSpec(amplitude=amplitude, base_period=5, length=5 * 400, seed=11)

    magnitudes = np.abs(generate_rs(spec)[::5]) / amplitude
    result = stats.kstest(magnitudes, "uniform")

    assert len(magnitudes) >= 200
    assert result.pvalue > 0.01


def test_rs_both_signs():
    """Test that the PRBS levels take both signs"""
    signal = generate_rs(RsSignalSpec(amplitude=1.0, base_period=1, length=200, seed=5))

    assert np.any(signal > 0) and np.any(signal < 0)


def test_rs_rejects_bad_arguments():
    """Test argument validation"""
    with pytest.raises(ArgumentError):
        RsSignalSpec(amplitude=0.0, base_period=5, length=10)
    with pytest.raises(ArgumentError):
        RsSignalSpec(amplitude=1.0, base_period=5, length=0)
    with pytest.raises(ArgumentError):
        RsSignalSpec(amplitude=1.0, base_period=0, length=10)
    with pytest.raises(ArgumentError):
        RsSignalSpec(amplitude=1.0, base_period=5, length=10, prbs_order=1)


def test_lfsr_maximal_length():
    """Test that the order-9 register has period 511 with 256 ones"""
    bits = lfsr_bits(9, 2 * 511, state=1)

    np.testing.assert_array_equal(bits[:511], bits[511:])
    assert int(bits[:511].sum()) == 256
    for divisor in (7, 73):
        assert not np.array_equal(bits[divisor : divisor + 511], bits[:511])


def test_generate_rs_inputs_independent_channels():
    """Test multi-channel generation from one seed"""
    inputs = generate_rs_inputs(1.5, n_channels=2, length=300, seed=9)

    assert inputs.shape == (2, 300)
    assert np.all(np.abs(inputs) <= 1.5)
    assert not np.array_equal(inputs[0], inputs[1])
    np.testing.assert_array_equal(inputs, generate_rs_inputs(1.5, 2, 300, seed=9))


if __name__ == "__main__":
    pytest.main([__file__])
