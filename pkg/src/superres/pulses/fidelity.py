"""
Fidelity of the RF pi pulse that maps the electron population onto the nuclear spin
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.hermite import hermgauss

from ..core.errors import ConfigError, DomainError
from ..core.rng import CHUNK_SIZE
from ..sensing.oracle import McConfig, McEstimate, run_chunks, summarize

logger = logging.getLogger(__name__)

QUADRATURE_NODES = 64


@dataclass(frozen=True)
class RfPulseModel:
    """Nominal pi pulse (rabi * duration = pi) with Gaussian detuning and amplitude noise"""
    rabi: float
    duration: float
    detuning_std: float = 0.0
    amplitude_std: float = 0.0

    def __post_init__(self):
        if self.rabi <= 0 or self.duration <= 0:
            raise ConfigError("Rabi frequency and duration must be positive")
        if not math.isclose(self.rabi * self.duration, math.pi, rel_tol=1e-9):
            raise ConfigError(f"Not a pi pulse: rabi * duration = {self.rabi * self.duration}")
        if self.detuning_std < 0 or self.amplitude_std < 0:
            raise ConfigError("Noise widths must be non-negative")

    @classmethod
    def from_duration(cls, duration: float, detuning_std: float = 0.0,
                      amplitude_std: float = 0.0) -> 'RfPulseModel':
        return cls(math.pi / duration, duration, detuning_std, amplitude_std)


@dataclass(frozen=True)
class FidelityReport:
    """point_fidelity is taken one standard deviation off on both noise axes"""
    point_fidelity: float
    average_fidelity: float
    worst_case_3sigma: float
    quadrature_error_estimate: float


def sigma_delta_from_t2star(t2_star: float) -> float:
    """Detuning spread sqrt(2)/T2* in rad/s"""
    if t2_star <= 0:
        raise DomainError("T2* must be positive")
    return math.sqrt(2.0) / t2_star


def _fidelity(rabi, detuning, amplitude_error):
    drive = rabi * (1.0 + np.asarray(amplitude_error, dtype=float))
    effective = np.hypot(drive, detuning)
    safe = np.where(effective > 0, effective, 1.0)
    value = (drive / safe) ** 2 * np.sin(0.5 * np.pi * effective / rabi) ** 2
    return np.where(effective > 0, value, 0.0)


def pulse_fidelity(rabi: float, detuning: float, amplitude_error: float) -> float:
    """
    Transfer fidelity of a nominal pi pulse with drive rabi (1 + a) and detuning delta:
    (rabi^2 (1 + a)^2 / W^2) sin^2((W / rabi) pi / 2), W^2 = rabi^2 (1 + a)^2 + delta^2.
    """
    if rabi <= 0:
        raise DomainError("Rabi frequency must be positive")
    if amplitude_error < -1:
        raise DomainError(f"Amplitude error must be >= -1, got {amplitude_error}")
    return float(_fidelity(rabi, detuning, amplitude_error))


def _axis(std: float, nodes: int):
    if std == 0:
        return np.zeros(1), np.ones(1)
    x, w = hermgauss(nodes)
    return math.sqrt(2.0) * std * x, w / math.sqrt(math.pi)


def _quadrature(model: RfPulseModel, nodes: int) -> float:
    detunings, w_detuning = _axis(model.detuning_std, nodes)
    errors, w_error = _axis(model.amplitude_std, nodes)
    # amplitude errors below -1 carry negligible weight; clip them to zero drive
    errors = np.maximum(errors, -1.0)
    grid = _fidelity(model.rabi, detunings[:, None], errors[None, :])
    return float(w_detuning @ grid @ w_error)


def average_fidelity(model: RfPulseModel, nodes: int = QUADRATURE_NODES) -> FidelityReport:
    """Gauss-Hermite average over both noise sources; error from doubling the node count"""
    if nodes < 40:
        raise DomainError("At least 40 quadrature nodes per axis are required")
    average = _quadrature(model, nodes)
    refined = _quadrature(model, 2 * nodes)
    worst = pulse_fidelity(model.rabi, 3.0 * model.detuning_std, 3.0 * model.amplitude_std)
    return FidelityReport(
        point_fidelity=pulse_fidelity(model.rabi, model.detuning_std, model.amplitude_std),
        average_fidelity=refined,
        worst_case_3sigma=worst,
        quadrature_error_estimate=abs(refined - average),
    )


def mc_average_fidelity(model: RfPulseModel, n_samples: int, seed: int,
                        stream_id: int = 0, workers: int = 1) -> McEstimate:
    """Monte Carlo oracle for average_fidelity"""
    mc = McConfig(n_samples, seed, stream_id, workers=workers, chunk_size=CHUNK_SIZE)
    if model.detuning_std == 0 and model.amplitude_std == 0:
        return McEstimate(pulse_fidelity(model.rabi, 0.0, 0.0), 0.0, n_samples)

    def sampler(rng, size):
        detuning = rng.normal(0.0, model.detuning_std, size)
        errors = np.maximum(rng.normal(0.0, model.amplitude_std, size), -1.0)
        return _fidelity(model.rabi, detuning, errors)

    return summarize(run_chunks(sampler, mc))


def mapping_epsilon(report: FidelityReport) -> float:
    """Infidelity of the mapping pulse, usable as an epsilon floor"""
    return 1.0 - report.average_fidelity
