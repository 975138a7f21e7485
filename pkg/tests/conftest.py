"""Shared oracles and scenario helpers.

The oracles here are deliberately independent of the package code paths they
check: frequency is measured by counting toggles, and test tones are
synthesised directly from closed-form phase rather than through the sensor
model.
"""

import numpy as np
import pytest

import lightleak as ll


def measured_frequency(trace) -> float:
    """Toggle-counting frequency oracle: toggles / 2 / duration."""
    values = np.asarray(trace.values if hasattr(trace, "values") else trace)
    toggles = int(np.count_nonzero(np.diff(values.astype(np.int16))))
    return toggles / 2.0 / trace.duration


def synth_square(freq_hz: float, sample_rate: float, n_samples: int,
                 phase0: float = 0.0) -> np.ndarray:
    """Closed-form square wave (values 0/1), independent of the sensor model."""
    t = np.arange(n_samples, dtype=np.float64) / sample_rate
    return (np.floor(2.0 * (phase0 + freq_hz * t)) % 2.0).astype(np.float64)


@pytest.fixture
def fast_link():
    """A cheap, clean link configuration for end-to-end unit tests.

    Short symbols and a slow sensor keep each simulated transmission around
    a quarter of a second of 10 MS/s samples.
    """
    config = ll.ChannelConfig(
        noise_sigma=0.0,
        ambient_intensity=0.0,
        fade_duration=0.001,
        sensor_time_constant=0.0005,
        max_command_rate=1000.0,
    )
    alphabet = ll.SymbolAlphabet(symbol_period=0.003)
    return config, alphabet
