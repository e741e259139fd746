"""
Core physical model for superres
Two-tone signals, pulse sequences and the dynamical-decoupling frame
"""

import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, Any, List, Optional, Tuple

from .errors import ConfigError, DomainError
from .units import TWO_PI, hz_to_rad

logger = logging.getLogger(__name__)

SMALL_DETUNING = 1e-3
XY8_BLOCK = 8

_HZ_CONSTANTS = ('zero_field_splitting', 'gamma_nv', 'hyperfine_parallel', 'gamma_n')
_PLAIN_CONSTANTS = ('field_z', 't2', 't2_star_nuclear', 'nuclear_lifetime',
                    'rf_pi_duration', 'rf_amplitude_std')


class PhaseKind(str, Enum):
    INDEPENDENT_UNIFORM = 'independent_uniform'
    FIXED = 'fixed'


@dataclass(frozen=True)
class PhaseModel:
    """How the tone phases are drawn for each shot"""
    kind: PhaseKind = PhaseKind.INDEPENDENT_UNIFORM
    phases: Tuple[float, float] = (0.0, 0.0)

    @classmethod
    def fixed(cls, phi_1: float, phi_2: float) -> 'PhaseModel':
        return cls(PhaseKind.FIXED, (float(phi_1), float(phi_2)))

    @classmethod
    def from_config(cls, value: Any) -> 'PhaseModel':
        """Accept 'independent_uniform' or {'fixed': [phi_1, phi_2]}"""
        if value is None or value == PhaseKind.INDEPENDENT_UNIFORM.value:
            return cls()
        if isinstance(value, dict) and 'fixed' in value:
            phi_1, phi_2 = value['fixed']
            return cls.fixed(phi_1, phi_2)
        raise ConfigError(f"Unknown phase model: {value!r}")

    def to_config(self) -> Any:
        if self.kind is PhaseKind.FIXED:
            return {'fixed': list(self.phases)}
        return self.kind.value


@dataclass(frozen=True)
class TwoToneSignal:
    """
    Two incoherent tones Omega_i sin(omega_i t + phi_i).
    All frequencies in rad/s.
    """
    amplitude_1: float
    amplitude_2: float
    omega_1: float
    omega_2: float
    phase_model: PhaseModel = field(default_factory=PhaseModel)

    def __post_init__(self):
        if self.amplitude_1 < 0 or self.amplitude_2 < 0:
            raise ConfigError("Signal amplitudes must be non-negative")
        if self.omega_1 <= 0 or self.omega_2 <= 0:
            raise ConfigError("Signal frequencies must be positive")

    @classmethod
    def from_hz(cls, amplitude_1: float, amplitude_2: float, frequency_1: float,
                frequency_2: float, phase_model: Optional[PhaseModel] = None) -> 'TwoToneSignal':
        return cls(hz_to_rad(amplitude_1), hz_to_rad(amplitude_2),
                   hz_to_rad(frequency_1), hz_to_rad(frequency_2),
                   phase_model or PhaseModel())

    @classmethod
    def from_center(cls, amplitude: float, omega_s: float, delta_r: float,
                    phase_model: Optional[PhaseModel] = None) -> 'TwoToneSignal':
        """Equal-amplitude pair at omega_s +/- delta_r"""
        return cls(amplitude, amplitude, omega_s + delta_r, omega_s - delta_r,
                   phase_model or PhaseModel())

    @property
    def omega_s(self) -> float:
        return 0.5 * (self.omega_1 + self.omega_2)

    @property
    def delta_r(self) -> float:
        return 0.5 * (self.omega_1 - self.omega_2)


@dataclass(frozen=True)
class XY8Rounding:
    """Result of snapping a requested time onto whole XY8 blocks"""
    requested_time: float
    total_time: float
    pulse_count: int

    @property
    def error(self) -> float:
        return self.total_time - self.requested_time


@dataclass(frozen=True)
class DdSequence:
    """Equally spaced instantaneous pi pulses"""
    pulse_spacing: float
    pulse_count: int

    def __post_init__(self):
        if not self.pulse_spacing > 0:
            raise ConfigError(f"Pulse spacing must be positive, got {self.pulse_spacing}")
        if int(self.pulse_count) != self.pulse_count or self.pulse_count < 1:
            raise ConfigError(f"Pulse count must be a positive integer, got {self.pulse_count}")

    @property
    def omega_dd(self) -> float:
        return math.pi / self.pulse_spacing

    @property
    def total_time(self) -> float:
        return self.pulse_count * self.pulse_spacing

    @classmethod
    def for_time(cls, pulse_spacing: float, total_time: float,
                 block: int = XY8_BLOCK) -> Tuple['DdSequence', XY8Rounding]:
        """Sequence with a whole number of blocks closest to total_time"""
        rounding = xy8_rounding(pulse_spacing, total_time, block)
        return cls(pulse_spacing, rounding.pulse_count), rounding


def xy8_rounding(pulse_spacing: float, total_time: float, block: int = XY8_BLOCK) -> XY8Rounding:
    if pulse_spacing <= 0 or total_time <= 0:
        raise ConfigError("Pulse spacing and total time must be positive")
    blocks = max(1, int(round(total_time / (block * pulse_spacing))))
    count = blocks * block
    rounding = XY8Rounding(total_time, count * pulse_spacing, count)
    if rounding.error:
        logger.debug("Rounded t=%.6g s to %d pulses (%.3g s off)", total_time, count, rounding.error)
    return rounding


@dataclass(frozen=True)
class EffectiveSignal:
    """
    Tones in the frame of the control sequence.
    amp_eff_i are the attenuated amplitudes, delta_i = omega_dd - omega_i.
    """
    amp_eff_1: float
    amp_eff_2: float
    delta_1: float
    delta_2: float
    small_detuning: Tuple[bool, bool] = (False, False)

    @classmethod
    def from_detunings(cls, amplitude: float, delta_s: float, delta_r: float,
                       amplitude_2: Optional[float] = None) -> 'EffectiveSignal':
        return cls(amplitude, amplitude if amplitude_2 is None else amplitude_2,
                   delta_s - delta_r, delta_s + delta_r)

    @property
    def delta_s(self) -> float:
        return 0.5 * (self.delta_1 + self.delta_2)

    @property
    def delta_r(self) -> float:
        return 0.5 * (self.delta_2 - self.delta_1)

    @property
    def equal_amplitudes(self) -> bool:
        return math.isclose(self.amp_eff_1, self.amp_eff_2, rel_tol=1e-12, abs_tol=0.0)

    @property
    def amplitude(self) -> float:
        """Common amplitude of an equal-amplitude pair"""
        if not self.equal_amplitudes:
            raise DomainError("Effective amplitudes differ; no common amplitude")
        return self.amp_eff_1

    def with_delta_r(self, delta_r: float) -> 'EffectiveSignal':
        delta_s = self.delta_s
        return replace(self, delta_1=delta_s - delta_r, delta_2=delta_s + delta_r)

    def with_delta_s(self, delta_s: float) -> 'EffectiveSignal':
        delta_r = self.delta_r
        return replace(self, delta_1=delta_s - delta_r, delta_2=delta_s + delta_r)

    def with_amplitude(self, amplitude: float) -> 'EffectiveSignal':
        return replace(self, amp_eff_1=amplitude, amp_eff_2=amplitude)


def scaling_factor(ratio: float) -> float:
    """
    Exact amplitude attenuation tan(pi / (2(1 + x))) * x for x = delta/omega.

    Evaluated as x / tan(eps) with eps = pi x / (2(1 + x)), which is finite at x = 0 (2/pi).
    """
    if not math.isfinite(ratio) or abs(ratio) >= 1.0:
        raise DomainError(f"Detuning ratio must satisfy |delta/omega| < 1, got {ratio}")
    if ratio == 0.0:
        return 2.0 / math.pi
    eps = math.pi * ratio / (2.0 * (1.0 + ratio))
    turns = round(eps / math.pi)
    if turns != 0 and abs(eps / math.pi - turns) < 1e-12:
        raise DomainError(
            f"Pulse spacing resonant with a filter harmonic (delta/omega = {ratio:.6g})")
    return ratio / math.tan(eps)


def effective_transform(signal: TwoToneSignal, dd: DdSequence) -> EffectiveSignal:
    """Map lab-frame tones into the frame of the pulse sequence"""
    omega_dd = dd.omega_dd
    amplitudes = []
    deltas = []
    flags = []
    for amplitude, omega in ((signal.amplitude_1, signal.omega_1),
                             (signal.amplitude_2, signal.omega_2)):
        delta = omega_dd - omega
        ratio = delta / omega
        amplitudes.append(scaling_factor(ratio) * amplitude)
        deltas.append(delta)
        flags.append(abs(ratio) < SMALL_DETUNING)
    return EffectiveSignal(amplitudes[0], amplitudes[1], deltas[0], deltas[1], tuple(flags))


def ramsey_effective(signal: TwoToneSignal) -> EffectiveSignal:
    """Free-evolution frame: no attenuation, detunings -omega_i"""
    return EffectiveSignal(signal.amplitude_1, signal.amplitude_2,
                           -signal.omega_1, -signal.omega_2)


def superresolution_times(delta_s: float, n_max: int) -> List[float]:
    """Times 2 n pi / |delta_s| for n = 1..n_max"""
    if delta_s == 0:
        raise DomainError("Superresolution time diverges for delta_s = 0")
    if n_max < 1:
        raise DomainError(f"n_max must be >= 1, got {n_max}")
    return [n * TWO_PI / abs(delta_s) for n in range(1, n_max + 1)]


def superresolution_offset(delta_s: float, t: float) -> Tuple[int, float]:
    """Nearest order n >= 1 and the phase offset |delta_s| t - 2 n pi"""
    phase = abs(delta_s) * t
    n = max(1, int(round(phase / TWO_PI)))
    return n, phase - n * TWO_PI


@dataclass(frozen=True)
class ProtocolConfig:
    """A single sensing protocol: signal, optional DD sequence, timing and repetitions"""
    signal: TwoToneSignal
    total_time: float
    dd: Optional[DdSequence] = None
    decay_rate: float = 0.0
    n_exp: int = 1

    def __post_init__(self):
        if not self.total_time > 0:
            raise ConfigError(f"Total time must be positive, got {self.total_time}")
        if self.decay_rate < 0:
            raise ConfigError(f"Decay rate must be non-negative, got {self.decay_rate}")
        if self.n_exp < 1:
            raise ConfigError(f"n_exp must be >= 1, got {self.n_exp}")
        if self.dd is not None and not math.isclose(self.dd.total_time, self.total_time,
                                                    rel_tol=1e-9):
            raise ConfigError(
                f"Total time {self.total_time:.6g} s differs from "
                f"{self.dd.pulse_count} x {self.dd.pulse_spacing:.6g} s")

    @property
    def is_ramsey(self) -> bool:
        return self.dd is None

    def effective(self) -> EffectiveSignal:
        if self.dd is None:
            return ramsey_effective(self.signal)
        return effective_transform(self.signal, self.dd)


@dataclass(frozen=True)
class ExperimentConstants:
    """
    Documentation constants of the reference experiment.
    Frequencies in rad/s, gyromagnetic ratios in rad/s/G, field in T, times in s.
    """
    zero_field_splitting: float = hz_to_rad(2.87e9)
    gamma_nv: float = hz_to_rad(2.802e6)
    hyperfine_parallel: float = hz_to_rad(3.03e6)
    gamma_n: float = hz_to_rad(-0.432e3)
    field_z: float = 0.598
    t2: float = 1.3e-3
    t2_star_nuclear: float = 1.4e-3
    nuclear_lifetime: float = 60e-3
    rf_pi_duration: float = 37e-6
    rf_amplitude_std: float = 0.005

    @property
    def decay_rate(self) -> float:
        return 1.0 / self.t2

    @classmethod
    def from_config(cls, values: Dict[str, Any]) -> 'ExperimentConstants':
        """Build from the Hz-based 'constants' section"""
        values = values or {}
        unknown = set(values) - {f"{k}_hz" for k in _HZ_CONSTANTS} - set(_PLAIN_CONSTANTS)
        if unknown:
            raise ConfigError(f"Unknown constants: {', '.join(sorted(unknown))}")
        kwargs = {}
        for key in _HZ_CONSTANTS:
            if f'{key}_hz' in values:
                kwargs[key] = hz_to_rad(values[f'{key}_hz'])
        for key in _PLAIN_CONSTANTS:
            if key in values:
                kwargs[key] = float(values[key])
        return cls(**kwargs)
