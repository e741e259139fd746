"""
Fisher information of the transition probability with respect to delta_r,
and the Cramer-Rao bounds that follow from it
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Optional

import numpy as np

from ..core.errors import ConfigError, DomainError
from ..core.model import EffectiveSignal, superresolution_offset
from ..sensing.probability import transition_probability_decohered

logger = logging.getLogger(__name__)

SUPERRESOLUTION_TOLERANCE = 1e-6


class NoiseKind(str, Enum):
    QPN_ONLY = 'qpn_only'
    EPSILON_FLOOR = 'epsilon_floor'
    DECOHERENCE = 'decoherence'
    READOUT_VARIANCE = 'readout_variance'


@dataclass(frozen=True)
class NoiseModel:
    """Variance model of one binary measurement; value is epsilon, Gamma or sigma^2"""
    kind: NoiseKind = NoiseKind.QPN_ONLY
    value: float = 0.0

    def __post_init__(self):
        if self.value < 0:
            raise DomainError(f"Noise parameter must be non-negative, got {self.value}")

    @classmethod
    def qpn_only(cls) -> 'NoiseModel':
        return cls()

    @classmethod
    def epsilon(cls, epsilon: float) -> 'NoiseModel':
        return cls(NoiseKind.EPSILON_FLOOR, epsilon)

    @classmethod
    def decoherence(cls, decay_rate: float) -> 'NoiseModel':
        return cls(NoiseKind.DECOHERENCE, decay_rate)

    @classmethod
    def readout(cls, variance: float) -> 'NoiseModel':
        return cls(NoiseKind.READOUT_VARIANCE, variance)

    @classmethod
    def from_config(cls, value: Any) -> 'NoiseModel':
        """'qpn_only' or a one-key mapping such as {'decoherence': 769.2}"""
        if value is None or value == NoiseKind.QPN_ONLY.value:
            return cls()
        if isinstance(value, dict) and len(value) == 1:
            (key, parameter), = value.items()
            try:
                return cls(NoiseKind(key), float(parameter))
            except ValueError as exc:
                raise ConfigError(f"Unknown noise model {key!r}") from exc
        raise ConfigError(f"Unknown noise model {value!r}")

    def variance(self, probability):
        """Per-shot variance of the outcome given the transition probability"""
        p = np.asarray(probability, dtype=float)
        if self.kind is NoiseKind.EPSILON_FLOOR:
            return (p + self.value) * (1.0 - p - self.value)
        if self.kind is NoiseKind.READOUT_VARIANCE:
            return p * (1.0 - p) + self.value
        return p * (1.0 - p)


@dataclass(frozen=True)
class FisherResult:
    """
    Per-shot Fisher information; status is 'ok', 'limit' when the analytic superresolution
    limit was used, or 'indeterminate' when the variance vanished off that path.
    """
    fi_per_shot: float
    n_exp: int
    noise: NoiseModel
    probability: float
    derivative: float
    status: str = 'ok'

    @property
    def fi_total(self) -> float:
        return self.n_exp * self.fi_per_shot

    @property
    def crb_std(self) -> float:
        total = self.fi_total
        return 1.0 / math.sqrt(total) if total > 0 else math.inf


def decoherence_epsilon(decay_rate: float, t):
    """Effective probability floor (exp(2 Gamma t) - 1) / 4"""
    return 0.25 * np.expm1(2.0 * decay_rate * np.asarray(t, dtype=float))


def superresolution_fi(amplitude: float, delta_s: float, t):
    """4 A^2 t^2 / delta_s^2; equals 4 A^2 t^4 / (2 pi)^2 at t = 2 pi / delta_s"""
    return 4.0 * (amplitude * np.asarray(t, dtype=float) / delta_s) ** 2


def ramsey_fi(amplitude: float, omega_s: float, t):
    """Free-evolution form 4 Omega^2 t^2 / omega_s^2 at t = 2 n pi / omega_s"""
    return superresolution_fi(amplitude, omega_s, t)


def epsilon_floor_fi(b_t: float, delta_r, epsilon: float):
    """Small-delta_r form 4 b^2 delta_r^2 / (b delta_r^2 + epsilon)"""
    delta_sq = np.square(delta_r)
    return 4.0 * b_t ** 2 * delta_sq / (b_t * delta_sq + epsilon)


def decoherence_fi(b_t: float, delta_r, decay_rate: float, t: float):
    return epsilon_floor_fi(b_t, delta_r, decoherence_epsilon(decay_rate, t))


def _resolve_decay(decay_rate: float, noise: NoiseModel) -> float:
    if noise.kind is NoiseKind.DECOHERENCE:
        if decay_rate and not math.isclose(decay_rate, noise.value):
            raise DomainError("decay_rate conflicts with the decoherence noise model")
        return noise.value
    return decay_rate


def _step(eff: EffectiveSignal) -> float:
    return max(1e-6 * abs(eff.delta_s), 1e-3 * abs(eff.delta_r))


def _derivative(eff: EffectiveSignal, t, decay_rate: float):
    """Central difference in delta_r, Richardson-extrapolated"""
    delta_r = eff.delta_r
    h = _step(eff)

    def central(step):
        upper = transition_probability_decohered(eff.with_delta_r(delta_r + step), t, decay_rate)
        lower = transition_probability_decohered(eff.with_delta_r(delta_r - step), t, decay_rate)
        return (np.asarray(upper) - np.asarray(lower)) / (2.0 * step)

    coarse = central(h)
    fine = central(0.5 * h)
    return (4.0 * fine - coarse) / 3.0


def _limit_mask(eff: EffectiveSignal, t, decay_rate: float, noise: NoiseModel):
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if noise.kind is not NoiseKind.QPN_ONLY or decay_rate or eff.delta_r != 0 or eff.delta_s == 0:
        return np.zeros(t.shape, dtype=bool)
    offsets = np.array([superresolution_offset(eff.delta_s, value)[1] for value in t])
    return np.abs(offsets) < SUPERRESOLUTION_TOLERANCE


def _limit_value(eff: EffectiveSignal, t):
    # b = (A1^2 + A2^2) t^2 / (2 delta_s^2) at delta_r -> 0
    b_t = (eff.amp_eff_1 ** 2 + eff.amp_eff_2 ** 2) * np.square(t) / (2.0 * eff.delta_s ** 2)
    return 4.0 * b_t


def _fisher_arrays(eff: EffectiveSignal, t, decay_rate: float, noise: NoiseModel):
    decay_rate = _resolve_decay(decay_rate, noise)
    times = np.atleast_1d(np.asarray(t, dtype=float))
    probability = np.atleast_1d(transition_probability_decohered(eff, times, decay_rate))
    derivative = np.atleast_1d(_derivative(eff, times, decay_rate))
    variance = np.atleast_1d(noise.variance(probability))
    limit = _limit_mask(eff, times, decay_rate, noise)

    fi = np.zeros(times.shape)
    status = np.full(times.shape, 'ok', dtype=object)
    positive = (variance > 0) & ~limit
    fi[positive] = derivative[positive] ** 2 / variance[positive]
    fi[limit] = _limit_value(eff, times[limit])
    status[limit] = 'limit'
    # zero variance off the limit path: FI stays 0
    status[~positive & ~limit] = 'indeterminate'
    return fi, probability, derivative, status


def fisher_information(eff: EffectiveSignal, t: float, decay_rate: float = 0.0,
                       noise: Optional[NoiseModel] = None, n_exp: int = 1) -> FisherResult:
    noise = noise or NoiseModel.qpn_only()
    fi, probability, derivative, status = _fisher_arrays(eff, t, decay_rate, noise)
    if status[0] == 'indeterminate':
        logger.debug("Indeterminate Fisher information at t=%.6g s", t)
    return FisherResult(float(fi[0]), n_exp, noise, float(probability[0]),
                        float(derivative[0]), str(status[0]))


def fisher_curve(eff: EffectiveSignal, times, decay_rate: float = 0.0,
                 noise: Optional[NoiseModel] = None) -> np.ndarray:
    """Per-shot Fisher information on a grid of times; indeterminate points are 0"""
    fi, _, _, _ = _fisher_arrays(eff, times, decay_rate, noise or NoiseModel.qpn_only())
    return fi


def crb_uncertainty(result: FisherResult, n_exp: Optional[int] = None) -> float:
    """Lower bound on the std of delta_r; infinite when there is no information"""
    total = (result.n_exp if n_exp is None else n_exp) * result.fi_per_shot
    return 1.0 / math.sqrt(total) if total > 0 else math.inf


def crb_curve(eff: EffectiveSignal, delta_rs, t: float, n_exp: int, decay_rate: float = 0.0,
              noise: Optional[NoiseModel] = None) -> np.ndarray:
    """Cramer-Rao bound at each delta_r, other parameters fixed"""
    noise = noise or NoiseModel.qpn_only()
    return np.array([
        fisher_information(eff.with_delta_r(float(delta_r)), t, decay_rate, noise, n_exp).crb_std
        for delta_r in np.asarray(delta_rs, dtype=float)
    ])
