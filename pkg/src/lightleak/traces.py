"""Uniformly sampled signal containers used along the simulated link.

All traces wrap a numpy array plus its sample rate.  They are treated as
immutable: operations always build new traces and never mutate values in
place, which keeps renders deterministic and thread-safe.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError


def _as_float_array(values) -> np.ndarray:
    return np.ascontiguousarray(np.asarray(values, dtype=np.float64))


def _as_binary_array(values) -> np.ndarray:
    arr = np.ascontiguousarray(np.asarray(values, dtype=np.uint8))
    if arr.size and arr.max() > 1:
        raise DomainError("binary trace values must be 0 or 1")
    return arr


@dataclass(frozen=True, eq=False)
class LevelTrace:
    """Effective brightness level over time, fading applied (values in [0, 255])."""

    sample_rate: float
    values: np.ndarray
    start_time: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "values", _as_float_array(self.values))
        if self.sample_rate <= 0:
            raise DomainError("sample_rate must be > 0")
        if self.values.size and not (self.values.min() >= 0.0 and self.values.max() <= 255.0):
            raise DomainError("level values must lie in [0, 255]")

    def __len__(self):
        return self.values.size

    @property
    def duration(self) -> float:
        return self.values.size / self.sample_rate


@dataclass(frozen=True, eq=False)
class PwmTrace:
    """Binary LED on/off waveform."""

    sample_rate: float
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "values", _as_binary_array(self.values))
        if self.sample_rate <= 0:
            raise DomainError("sample_rate must be > 0")

    def __len__(self):
        return self.values.size

    @property
    def duration(self) -> float:
        return self.values.size / self.sample_rate


@dataclass(frozen=True, eq=False)
class IntensityTrace:
    """Non-negative light intensity at the sensor, as a fraction of the
    transmitter full scale at reference geometry."""

    sample_rate: float
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "values", _as_float_array(self.values))
        if self.sample_rate <= 0:
            raise DomainError("sample_rate must be > 0")
        if self.values.size and self.values.min() < 0.0:
            raise DomainError("intensity values must be >= 0")

    def __len__(self):
        return self.values.size

    @property
    def duration(self) -> float:
        return self.values.size / self.sample_rate


@dataclass(frozen=True, eq=False)
class SensorTrace:
    """Binary square wave emitted by the light-to-frequency sensor."""

    sample_rate: float
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "values", _as_binary_array(self.values))
        if self.sample_rate <= 0:
            raise DomainError("sample_rate must be > 0")

    def __len__(self):
        return self.values.size

    @property
    def duration(self) -> float:
        return self.values.size / self.sample_rate
