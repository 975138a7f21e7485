"""Optical path and light-to-frequency sensor model."""

import numpy as np
import pytest

from conftest import measured_frequency

from lightleak import (
    ChannelConfig,
    CommandSchedule,
    IntensityTrace,
    PwmTrace,
    propagate,
    sensor_response,
    simulate_link,
)
from lightleak import bulb
from lightleak.errors import ConfigError


def _all_on(config, seconds=0.001):
    n = int(seconds * config.sample_rate)
    return PwmTrace(config.sample_rate, np.ones(n, dtype=np.uint8))


class TestPropagate:
    def test_reference_geometry_unit_gain(self):
        cfg = ChannelConfig(ambient_intensity=0.0, noise_sigma=0.0)
        out = propagate(_all_on(cfg), cfg)
        assert np.all(out.values == 1.0)

    def test_inverse_square(self):
        cfg = ChannelConfig(distance=0.2, ambient_intensity=0.0, noise_sigma=0.0)
        out = propagate(_all_on(cfg), cfg)
        assert np.allclose(out.values, 0.25)
        cfg4 = cfg.replace(distance=0.4)
        out4 = propagate(_all_on(cfg4), cfg4)
        assert np.allclose(out4.values, 0.25 / 4)

    def test_angle_cosine(self):
        cfg = ChannelConfig(angle=np.pi / 3, ambient_intensity=0.0, noise_sigma=0.0)
        out = propagate(_all_on(cfg), cfg)
        assert np.allclose(out.values, 0.5)

    def test_ambient_offset(self):
        cfg = ChannelConfig(ambient_intensity=0.05, noise_sigma=0.0)
        pwm = PwmTrace(cfg.sample_rate, np.zeros(1000, dtype=np.uint8))
        out = propagate(pwm, cfg)
        assert np.allclose(out.values, 0.05)

    def test_seed_determinism(self):
        cfg = ChannelConfig(noise_sigma=0.01, rng_seed=42)
        a = propagate(_all_on(cfg), cfg)
        b = propagate(_all_on(cfg), cfg)
        assert np.array_equal(a.values, b.values)
        c = propagate(_all_on(cfg.replace(rng_seed=43)), cfg.replace(rng_seed=43))
        assert not np.array_equal(a.values, c.values)

    def test_noise_clamped_at_zero(self):
        cfg = ChannelConfig(ambient_intensity=0.0, noise_sigma=0.5, rng_seed=1)
        pwm = PwmTrace(cfg.sample_rate, np.zeros(10_000, dtype=np.uint8))
        out = propagate(pwm, cfg)
        assert out.values.min() == 0.0


class TestSensorResponse:
    def test_full_scale_frequency(self):
        # criterion oracle: toggle counting over 10 ms
        cfg = ChannelConfig()
        n = int(0.01 * cfg.sample_rate)
        intensity = IntensityTrace(cfg.sample_rate, np.ones(n))
        wave = sensor_response(intensity, cfg)
        assert measured_frequency(wave) == pytest.approx(800_000.0, rel=0.005)

    def test_dark_is_silent(self):
        cfg = ChannelConfig(sensor_dark_frequency=0.0)
        intensity = IntensityTrace(cfg.sample_rate, np.zeros(50_000))
        wave = sensor_response(intensity, cfg)
        assert np.all(wave.values == wave.values[0])

    def test_half_intensity_half_frequency(self):
        cfg = ChannelConfig()
        n = int(0.01 * cfg.sample_rate)
        intensity = IntensityTrace(cfg.sample_rate, np.full(n, 0.5))
        wave = sensor_response(intensity, cfg)
        assert abs(measured_frequency(wave) - 400_000.0) <= 1.0 / wave.duration

    def test_dark_frequency_offset(self):
        cfg = ChannelConfig(sensor_dark_frequency=50_000.0)
        n = int(0.01 * cfg.sample_rate)
        intensity = IntensityTrace(cfg.sample_rate, np.zeros(n))
        wave = sensor_response(intensity, cfg)
        assert abs(measured_frequency(wave) - 50_000.0) <= 1.0 / wave.duration

    def test_sample_rate_mismatch(self):
        cfg = ChannelConfig()
        intensity = IntensityTrace(cfg.sample_rate / 2, np.ones(1000))
        with pytest.raises(ConfigError):
            sensor_response(intensity, cfg)

    def test_slow_sensor_reports_duty_average(self):
        # sensor_time_constant >> PWM period: once settled, the output
        # frequency encodes duty * gain + ambient to within 1 %
        cfg = ChannelConfig(noise_sigma=0.0, sensor_time_constant=0.002)
        level = 140
        n = int(0.06 * cfg.sample_rate)
        from lightleak.traces import LevelTrace, SensorTrace
        levels = LevelTrace(cfg.sample_rate, np.full(n, float(level)))
        wave = sensor_response(propagate(bulb.render_pwm(levels, cfg), cfg), cfg)
        settled = SensorTrace(cfg.sample_rate,
                              wave.values[int(0.02 * cfg.sample_rate):])
        expected = ((level / 255) * cfg.geometric_gain + cfg.ambient_intensity) \
            * cfg.sensor_full_scale_frequency
        assert measured_frequency(settled) == pytest.approx(expected, rel=0.01)


class TestSimulateLink:
    def test_matches_manual_composition(self):
        cfg = ChannelConfig(noise_sigma=0.002, rng_seed=11, fade_duration=0.001,
                            sensor_time_constant=0.0005)
        sched = CommandSchedule.from_pairs([(0.002, 135), (0.01, 140)], 137)
        duration = 0.02
        via_link = simulate_link(sched, cfg, duration)
        levels = bulb.render_level_trace(sched, cfg, duration)
        pwm = bulb.render_pwm(levels, cfg)
        manual = sensor_response(propagate(pwm, cfg), cfg)
        assert np.array_equal(via_link.values, manual.values)

    def test_steady_state_closed_form(self):
        from lightleak.traces import SensorTrace
        cfg = ChannelConfig(noise_sigma=0.0, distance=0.2, angle=0.3,
                            sensor_time_constant=0.002)
        sched = CommandSchedule((), 140)
        wave = simulate_link(sched, cfg, 0.06)
        settled = SensorTrace(cfg.sample_rate,
                              wave.values[int(0.02 * cfg.sample_rate):])
        expected = ((140 / 255) * cfg.geometric_gain + cfg.ambient_intensity) \
            * cfg.sensor_full_scale_frequency
        assert measured_frequency(settled) == pytest.approx(expected, rel=0.01)

    def test_level_zero_silent(self):
        cfg = ChannelConfig(noise_sigma=0.0, ambient_intensity=0.0,
                            sensor_dark_frequency=0.0)
        wave = simulate_link(CommandSchedule((), 0), cfg, 0.01)
        assert np.all(wave.values == wave.values[0])

    def test_seed_reproducibility(self):
        cfg = ChannelConfig(noise_sigma=0.005, rng_seed=99, fade_duration=0.001)
        sched = CommandSchedule.from_pairs([(0.001, 135)], 140)
        a = simulate_link(sched, cfg, 0.01)
        b = simulate_link(sched, cfg, 0.01)
        assert np.array_equal(a.values, b.values)
