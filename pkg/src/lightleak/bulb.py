"""Smart bulb model: commands, bridge rate limiting, fading, PWM rendering.

The bulb exposes exactly one lever to an attacker: timestamped brightness
commands with integer levels 0..255.  The bridge enforces a command rate
limit, the bulb fades smoothly between levels, and the LED driver turns the
effective level into a ~20 kHz PWM waveform whose duty cycle is level/255.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _kernels
from .config import ChannelConfig
from .errors import ConfigError, DomainError
from .traces import LevelTrace, PwmTrace

#: number of brightness steps above "off"
LEVEL_MAX = 255

#: minimum oversampling of the PWM carrier required for faithful rendering
PWM_RESOLUTION_FACTOR = 100.0


def _check_level(level) -> int:
    if isinstance(level, bool) or not float(level).is_integer():
        raise DomainError(f"brightness level must be an integer, got {level!r}")
    level = int(level)
    if not 0 <= level <= LEVEL_MAX:
        raise DomainError(f"brightness level must be in [0, {LEVEL_MAX}], got {level}")
    return level


def duty_cycle(level: int) -> float:
    """Fraction of each PWM period the LED is on for a brightness level.

    One level step corresponds to a 1/255 duty step (0.392 % per level).
    """
    return _check_level(level) / LEVEL_MAX


@dataclass(frozen=True)
class BrightnessCommand:
    """A single brightness-change command sent through the bridge."""

    at_time: float
    level: int

    def __post_init__(self):
        object.__setattr__(self, "level", _check_level(self.level))
        t = float(self.at_time)
        if not np.isfinite(t) or t < 0:
            raise DomainError(f"command time must be finite and >= 0, got {self.at_time!r}")
        object.__setattr__(self, "at_time", t)


@dataclass(frozen=True)
class CommandSchedule:
    """An ordered sequence of brightness commands plus the level before the first."""

    commands: tuple[BrightnessCommand, ...]
    initial_level: int

    def __post_init__(self):
        object.__setattr__(self, "commands", tuple(self.commands))
        object.__setattr__(self, "initial_level", _check_level(self.initial_level))
        times = [c.at_time for c in self.commands]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise DomainError("command times must be strictly increasing")

    @classmethod
    def from_pairs(cls, pairs, initial_level: int) -> "CommandSchedule":
        """Build a schedule from (time, level) pairs."""
        return cls(tuple(BrightnessCommand(t, lv) for t, lv in pairs), initial_level)

    def __len__(self):
        return len(self.commands)

    @property
    def last_time(self) -> float:
        return self.commands[-1].at_time if self.commands else 0.0


class RateLimited(NamedTuple):
    schedule: CommandSchedule
    total_delay: float


#: relative slack when checking inter-command gaps, absorbs float rounding in
#: schedules built from multiples of the symbol period
_GAP_SLACK = 1e-9


def apply_rate_limit(schedule: CommandSchedule, max_rate: float) -> RateLimited:
    """Enforce the bridge command rate limit by pushing late commands back.

    Commands closer than ``1/max_rate`` to their predecessor are delayed just
    enough to restore the minimum gap (order preserved, nothing dropped).
    Returns the adjusted schedule and the total delay added.
    """
    if max_rate <= 0:
        raise DomainError(f"max_rate must be > 0, got {max_rate}")
    min_gap = 1.0 / max_rate
    slack = min_gap * _GAP_SLACK
    out = []
    total_delay = 0.0
    prev = -np.inf
    for cmd in schedule.commands:
        t = cmd.at_time
        if t < prev + min_gap - slack:
            t = prev + min_gap
            total_delay += t - cmd.at_time
            out.append(BrightnessCommand(t, cmd.level))
        else:
            out.append(cmd)
        prev = t
    return RateLimited(CommandSchedule(tuple(out), schedule.initial_level), total_delay)


def fade_profile(from_level: int, to_level: int, fade_duration: float, t):
    """Effective level ``t`` seconds after a command, under a linear fade.

    Ramps linearly from ``from_level`` to ``to_level`` over ``fade_duration``;
    holds ``to_level`` afterwards.  A zero-duration fade switches immediately.
    Accepts scalar or array ``t``.
    """
    f = float(_check_level(from_level))
    g = float(_check_level(to_level))
    if fade_duration < 0:
        raise DomainError(f"fade_duration must be >= 0, got {fade_duration}")
    t = np.asarray(t, dtype=np.float64)
    if np.any(t < 0):
        raise DomainError("t must be >= 0")
    if fade_duration == 0.0:
        out = np.full_like(t, g)
    else:
        out = f + (g - f) * np.minimum(t / fade_duration, 1.0)
    return float(out) if out.ndim == 0 else out


def _fade_segments(schedule: CommandSchedule, fade_duration: float):
    """Piecewise-linear (t_start, t_end, v_start, v_end) segments of the level.

    Each command starts a linear ramp from the level the bulb is currently at
    (re-anchoring when fades overlap) toward its target over the fade time.
    """
    cmds = schedule.commands
    cur_v = float(schedule.initial_level)
    if not cmds:
        return [(0.0, np.inf, cur_v, cur_v)]
    # hold the initial level until the first command
    segments = [(0.0, cmds[0].at_time, cur_v, cur_v)]
    for k, cmd in enumerate(cmds):
        next_t = cmds[k + 1].at_time if k + 1 < len(cmds) else np.inf
        target = float(cmd.level)
        if fade_duration == 0.0:
            seg = (cmd.at_time, next_t, target, target)
            v_end = target
        else:
            fade_end = cmd.at_time + fade_duration
            if next_t < fade_end:
                frac = (next_t - cmd.at_time) / fade_duration
                v_end = cur_v + (target - cur_v) * frac
                seg = (cmd.at_time, next_t, cur_v, v_end)
            else:
                segments.append((cmd.at_time, fade_end, cur_v, target))
                seg = (fade_end, next_t, target, target)
                v_end = target
        segments.append(seg)
        cur_v = v_end
    return segments


def render_level_trace(schedule: CommandSchedule, config: ChannelConfig,
                       duration: float) -> LevelTrace:
    """Sample the effective brightness level over ``[0, duration)``.

    The level before the first command is ``schedule.initial_level``; each
    command starts a linear fade (``config.fade_duration``) from the current
    level toward its target.  Overlapping fades re-anchor at the interpolated
    level.
    """
    if duration <= 0:
        raise DomainError(f"duration must be > 0, got {duration}")
    if schedule.commands:
        need = schedule.last_time + config.fade_duration
        if duration < need:
            raise DomainError(
                f"duration {duration} s does not cover the last command plus its "
                f"fade ({need} s)")
    n = int(round(duration * config.sample_rate))
    dt = 1.0 / config.sample_rate

    segments = _fade_segments(schedule, config.fade_duration)
    t0s = np.array([s[0] for s in segments])
    spans = np.array([s[1] - s[0] for s in segments])
    v0s = np.array([s[2] for s in segments])
    dvs = np.array([s[3] - s[2] for s in segments])
    # segment j owns samples with t0s[j] <= i*dt < t0s[j+1]
    bounds = np.ceil(t0s * config.sample_rate).astype(np.int64)
    bounds = np.clip(np.maximum.accumulate(bounds), 0, n)
    bounds = np.append(bounds, n)
    bounds[0] = 0

    values = _kernels.level_fill(bounds, t0s, spans, v0s, dvs, dt)
    return LevelTrace(config.sample_rate, values)


def render_pwm(levels: LevelTrace, config: ChannelConfig) -> PwmTrace:
    """Render the LED on/off waveform for a level trace.

    The duty of each PWM period is latched from the level at the period start
    (zero-order hold).  Requires the sample rate to oversample the PWM carrier
    by at least ``PWM_RESOLUTION_FACTOR``; period boundaries are derived from
    the sample index so long renders accumulate no phase drift.
    """
    if levels.sample_rate != config.sample_rate:
        raise ConfigError(
            f"level trace sample rate {levels.sample_rate} != config sample rate "
            f"{config.sample_rate}")
    if config.sample_rate < PWM_RESOLUTION_FACTOR * config.pwm_frequency:
        raise ConfigError(
            f"sample_rate must be >= {PWM_RESOLUTION_FACTOR:g} x pwm_frequency to "
            f"resolve the PWM waveform ({config.sample_rate} < "
            f"{PWM_RESOLUTION_FACTOR * config.pwm_frequency})")
    step = config.pwm_frequency / config.sample_rate
    return PwmTrace(config.sample_rate, _kernels.pwm_wave(levels.values, step))
