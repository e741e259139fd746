"""
Unit conversions between configuration units (Hz) and internal units (rad/s)
"""

import math
from dataclasses import dataclass

TWO_PI = 2.0 * math.pi


def hz_to_rad(frequency_hz: float) -> float:
    """Convert a frequency in Hz to an angular frequency in rad/s"""
    return frequency_hz * TWO_PI


def rad_to_hz(omega: float) -> float:
    """Convert an angular frequency in rad/s to Hz"""
    return omega / TWO_PI


@dataclass(frozen=True)
class AngularFrequency:
    """An angular frequency held in rad/s"""
    value: float

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError(f"Angular frequency must be finite, got {self.value}")

    @classmethod
    def from_hz(cls, frequency_hz: float) -> 'AngularFrequency':
        return cls(hz_to_rad(frequency_hz))

    @property
    def hz(self) -> float:
        return rad_to_hz(self.value)

    def __float__(self) -> float:
        return self.value
