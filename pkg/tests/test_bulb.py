"""Bulb model: duty cycle, rate limiting, fading, level and PWM rendering."""

import numpy as np
import pytest

from lightleak import (
    BrightnessCommand,
    ChannelConfig,
    CommandSchedule,
    apply_rate_limit,
    duty_cycle,
    fade_profile,
    render_level_trace,
    render_pwm,
)
from lightleak.errors import ConfigError, DomainError
from lightleak.traces import LevelTrace


class TestDutyCycle:
    def test_level_one_is_one_255th(self):
        assert duty_cycle(1) == 1 / 255
        assert f"{duty_cycle(1) * 100:.3g}" == "0.392"

    def test_endpoints(self):
        assert duty_cycle(0) == 0.0
        assert duty_cycle(255) == 1.0

    @pytest.mark.parametrize("bad", [-1, 256, 1000])
    def test_out_of_range_rejected(self, bad):
        with pytest.raises(DomainError):
            duty_cycle(bad)

    def test_non_integer_rejected(self):
        with pytest.raises(DomainError):
            duty_cycle(1.5)

    def test_monotone_with_exact_step(self):
        duties = np.array([duty_cycle(k) for k in range(256)])
        steps = np.diff(duties)
        assert np.all(steps > 0)
        assert np.allclose(steps, 1 / 255, rtol=0, atol=1e-15)


class TestCommands:
    def test_command_validation(self):
        with pytest.raises(DomainError):
            BrightnessCommand(-0.5, 10)
        with pytest.raises(DomainError):
            BrightnessCommand(float("inf"), 10)
        with pytest.raises(DomainError):
            BrightnessCommand(0.0, 300)

    def test_schedule_requires_increasing_times(self):
        with pytest.raises(DomainError):
            CommandSchedule.from_pairs([(0.0, 10), (0.0, 20)], 0)
        with pytest.raises(DomainError):
            CommandSchedule.from_pairs([(1.0, 10), (0.5, 20)], 0)


class TestRateLimit:
    def test_push_back(self):
        sched = CommandSchedule.from_pairs([(0.0, 1), (0.05, 2), (0.2, 3)], 0)
        limited, delay = apply_rate_limit(sched, 10.0)
        times = [c.at_time for c in limited.commands]
        assert times == [0.0, 0.1, 0.2]
        assert delay == pytest.approx(0.05)
        assert [c.level for c in limited.commands] == [1, 2, 3]

    def test_compliant_schedule_unchanged(self):
        sched = CommandSchedule.from_pairs([(0.0, 1), (1.0, 2), (2.0, 3)], 0)
        limited, delay = apply_rate_limit(sched, 10.0)
        assert delay == 0.0
        assert limited == sched

    def test_empty_schedule(self):
        sched = CommandSchedule((), 5)
        limited, delay = apply_rate_limit(sched, 10.0)
        assert limited == sched
        assert delay == 0.0

    def test_min_gap_and_idempotence(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            times = np.sort(rng.uniform(0, 1, size=12))
            times += np.arange(12) * 1e-6  # ensure strictly increasing
            sched = CommandSchedule.from_pairs(
                [(float(t), int(lv)) for t, lv in zip(times, rng.integers(0, 256, 12))], 0)
            max_rate = float(rng.uniform(5, 50))
            once, _ = apply_rate_limit(sched, max_rate)
            gaps = np.diff([c.at_time for c in once.commands])
            assert np.all(gaps >= 1.0 / max_rate * (1 - 1e-9))
            twice, delay2 = apply_rate_limit(once, max_rate)
            assert twice == once
            assert delay2 == 0.0

    def test_bad_rate(self):
        with pytest.raises(DomainError):
            apply_rate_limit(CommandSchedule((), 0), 0.0)


class TestFadeProfile:
    def test_midpoint(self):
        assert fade_profile(135, 140, 0.4, 0.2) == pytest.approx(137.5)

    def test_past_fade_end(self):
        assert fade_profile(140, 135, 0.4, 1.0) == 135.0

    def test_no_op_fade(self):
        for t in (0.0, 0.1, 3.0):
            assert fade_profile(100, 100, 0.4, t) == 100.0

    def test_zero_duration_switches_immediately(self):
        assert fade_profile(10, 200, 0.0, 0.0) == 200.0
        assert fade_profile(10, 200, 0.0, 5.0) == 200.0

    def test_out_of_range_levels(self):
        with pytest.raises(DomainError):
            fade_profile(-1, 100, 0.4, 0.0)
        with pytest.raises(DomainError):
            fade_profile(100, 256, 0.4, 0.0)

    def test_array_input(self):
        t = np.array([0.0, 0.2, 0.4, 0.8])
        out = fade_profile(0, 100, 0.4, t)
        assert np.allclose(out, [0.0, 50.0, 100.0, 100.0])


class TestRenderLevelTrace:
    CFG = ChannelConfig(sample_rate=100_000.0, pwm_frequency=1000.0,
                        sensor_full_scale_frequency=20_000.0, fade_duration=0.4)

    def test_single_fade(self):
        sched = CommandSchedule.from_pairs([(0.0, 135)], 140)
        trace = render_level_trace(sched, self.CFG, 1.0)
        fs = self.CFG.sample_rate
        assert trace.values[0] == 140.0
        assert trace.values[int(0.2 * fs)] == pytest.approx(137.5)
        assert trace.values[int(0.4 * fs)] == pytest.approx(135.0)
        assert np.all(trace.values[int(0.5 * fs):] == 135.0)
        mid = trace.values[:int(0.4 * fs)]
        assert np.all(np.diff(mid) <= 0)

    def test_empty_schedule_constant(self):
        trace = render_level_trace(CommandSchedule((), 140), self.CFG, 0.5)
        assert len(trace) == int(0.5 * self.CFG.sample_rate)
        assert np.all(trace.values == 140.0)

    def test_overlapping_fades_reanchor(self):
        # 0 -> 200 over 1 s, interrupted at t=0.5 (level 100) by a fade to 0
        cfg = self.CFG.replace(fade_duration=1.0)
        sched = CommandSchedule.from_pairs([(0.0, 200), (0.5, 0)], 0)
        trace = render_level_trace(sched, cfg, 2.0)
        fs = cfg.sample_rate
        assert trace.values[int(0.25 * fs)] == pytest.approx(50.0)
        assert trace.values[int(0.5 * fs)] == pytest.approx(100.0)
        assert trace.values[int(1.0 * fs)] == pytest.approx(50.0)
        assert trace.values[int(1.5 * fs)] == pytest.approx(0.0)
        assert np.all(trace.values[int(1.5 * fs):] == 0.0)

    def test_duration_too_short(self):
        sched = CommandSchedule.from_pairs([(0.9, 135)], 140)
        with pytest.raises(DomainError):
            render_level_trace(sched, self.CFG, 1.0)

    def test_bounds_for_monotone_fades(self):
        rng = np.random.default_rng(3)
        levels = rng.integers(50, 200, size=5)
        pairs = [(0.5 * k, int(lv)) for k, lv in enumerate(levels)]
        sched = CommandSchedule.from_pairs(pairs, 120)
        trace = render_level_trace(sched, self.CFG, 3.0)
        lo = min(120, levels.min())
        hi = max(120, levels.max())
        assert trace.values.min() >= lo
        assert trace.values.max() <= hi

    def test_deterministic(self):
        sched = CommandSchedule.from_pairs([(0.1, 10), (0.7, 250)], 128)
        a = render_level_trace(sched, self.CFG, 2.0)
        b = render_level_trace(sched, self.CFG, 2.0)
        assert np.array_equal(a.values, b.values)


class TestRenderPwm:
    CFG = ChannelConfig()  # 20 kHz PWM at 10 MS/s

    def _constant(self, level, seconds=0.01):
        n = int(seconds * self.CFG.sample_rate)
        return LevelTrace(self.CFG.sample_rate, np.full(n, float(level)))

    def test_level_zero_all_off(self):
        pwm = render_pwm(self._constant(0), self.CFG)
        assert not np.any(pwm.values)

    def test_level_255_all_on(self):
        pwm = render_pwm(self._constant(255), self.CFG)
        assert np.all(pwm.values == 1)

    def test_level_254_off_spans(self):
        # one 20 kHz period is 500 samples at 10 MS/s; duty 254/255 leaves
        # ~196 ns off, which quantises to one or two 100 ns samples
        pwm = render_pwm(self._constant(254, seconds=0.06), self.CFG)
        period = int(self.CFG.sample_rate / self.CFG.pwm_frequency)
        n_periods = len(pwm.values) // period
        assert n_periods >= 1000
        off_per_period = (1 - pwm.values[:n_periods * period]
                          ).reshape(n_periods, period).sum(axis=1)
        assert np.all(off_per_period >= 1)
        assert np.all(off_per_period <= 2)

    @pytest.mark.parametrize("level", [1, 17, 128, 200, 254])
    def test_mean_duty_within_quantisation(self, level):
        pwm = render_pwm(self._constant(level), self.CFG)
        period = int(self.CFG.sample_rate / self.CFG.pwm_frequency)
        n_periods = len(pwm.values) // period
        mean = pwm.values[:n_periods * period].mean()
        assert abs(mean - level / 255) <= 1.0 / period

    def test_resolution_guard(self):
        cfg = ChannelConfig(sample_rate=4_000_000.0, pwm_frequency=100_000.0)
        trace = LevelTrace(cfg.sample_rate, np.full(1000, 100.0))
        with pytest.raises(ConfigError):
            render_pwm(trace, cfg)

    def test_sample_rate_mismatch(self):
        trace = LevelTrace(5_000_000.0, np.full(1000, 100.0))
        with pytest.raises(ConfigError):
            render_pwm(trace, self.CFG)

    def test_deterministic(self):
        trace = self._constant(140, seconds=0.002)
        a = render_pwm(trace, self.CFG)
        b = render_pwm(trace, self.CFG)
        assert np.array_equal(a.values, b.values)
