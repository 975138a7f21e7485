"""Optical path and light-to-frequency sensor model.

The path applies inverse-square distance loss and a cosine incidence factor,
adds ambient light and white Gaussian noise, and clamps at zero (no negative
light).  The sensor integrates the intensity with a first-order low-pass and
drives an oscillator whose square-wave output frequency is linear in the
filtered intensity, reaching ``sensor_full_scale_frequency`` at intensity 1.
"""

from __future__ import annotations

import math

import numpy as np

from . import _kernels, bulb
from .config import ChannelConfig
from .errors import ConfigError
from .traces import IntensityTrace, PwmTrace, SensorTrace
from .bulb import CommandSchedule


def propagate(pwm: PwmTrace, config: ChannelConfig) -> IntensityTrace:
    """Light intensity arriving at the sensor for a transmitted PWM waveform.

    Per sample: ``I = pwm * cos(angle) * (d_ref/distance)^2 + ambient + noise``
    clamped at 0.  Noise is white Gaussian drawn from a generator seeded with
    ``config.rng_seed``, so repeated calls are identical.
    """
    values = pwm.values * config.geometric_gain
    if config.ambient_intensity:
        values = values + config.ambient_intensity
    if config.noise_sigma > 0:
        rng = np.random.default_rng(config.rng_seed)
        values = values + rng.normal(0.0, config.noise_sigma, values.size)
    values = np.maximum(values, 0.0)
    return IntensityTrace(pwm.sample_rate, values)


def sensor_response(intensity: IntensityTrace, config: ChannelConfig) -> SensorTrace:
    """Square wave produced by the light-to-frequency sensor.

    The photodiode integrates the intensity with time constant
    ``sensor_time_constant``; the oscillator's instantaneous frequency is
    ``dark + filtered * full_scale`` and the output toggles each time the
    accumulated phase crosses a half-integer.  The filter starts in steady
    state at the first sample, so a constant input gives a constant rate.
    """
    if intensity.sample_rate != config.sample_rate:
        raise ConfigError(
            f"intensity sample rate {intensity.sample_rate} != config sample rate "
            f"{config.sample_rate}")
    x = intensity.values
    if x.size == 0:
        return SensorTrace(config.sample_rate, np.zeros(0, dtype=np.uint8))
    tau = config.sensor_time_constant
    if tau > 0:
        alpha = 1.0 - math.exp(-1.0 / (tau * config.sample_rate))
    else:
        alpha = 1.0
    filtered = _kernels.lowpass(x, alpha, x[0])
    freq = config.sensor_dark_frequency + filtered * config.sensor_full_scale_frequency
    wave = _kernels.square_wave(freq, config.sample_rate)
    return SensorTrace(config.sample_rate, wave)


def simulate_link(schedule: CommandSchedule, config: ChannelConfig,
                  duration: float) -> SensorTrace:
    """Full transmitter-to-sensor chain for a command schedule."""
    levels = bulb.render_level_trace(schedule, config, duration)
    pwm = bulb.render_pwm(levels, config)
    return sensor_response(propagate(pwm, config), config)
