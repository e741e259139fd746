"""
Signal-to-noise and noise-budget formulas for standard and SSR-assisted readout
"""

import math
from dataclasses import dataclass

from ..core.errors import ConfigError, DomainError


@dataclass(frozen=True)
class StdReadoutModel:
    """Standard fluorescence readout averaged over many sweeps"""
    c_bright: float = 1.03
    c_dark: float = 0.73
    n_bar: float = 0.25
    n_sweep: float = 2e5

    def __post_init__(self):
        if self.c_dark <= 0 or self.c_bright <= 0 or self.n_bar <= 0 or self.n_sweep <= 0:
            raise ConfigError("Standard readout parameters must be positive")

    @property
    def photons(self) -> float:
        return self.n_sweep * self.n_bar


@dataclass(frozen=True)
class SsrModel:
    """
    Single-shot readout assisted by the nuclear spin.

    mu_bright and mu_dark are photons per readout for the two electron states,
    readouts is R per SSR, f0/f_pi the nuclear flip probabilities for p0 = 1 and 0,
    repetitions is M per estimate.
    """
    mu_bright: float = 0.26
    mu_dark: float = 0.18
    readouts: int = 700
    f0: float = 0.70
    f_pi: float = 0.10
    fidelity: float = 0.9969
    repetitions: int = 4400

    def __post_init__(self):
        if not self.mu_bright > self.mu_dark >= 0:
            raise ConfigError("Expected mu_bright > mu_dark >= 0")
        if not 0 <= self.f_pi < self.f0 <= 1:
            raise ConfigError("Expected 0 <= f_pi < f0 <= 1")
        if not 0 <= self.fidelity <= 1:
            raise ConfigError("Fidelity must lie in [0, 1]")
        if self.readouts < 1 or self.repetitions < 1:
            raise ConfigError("readouts and repetitions must be >= 1")


@dataclass(frozen=True)
class NoiseBudget:
    """Std of the average photon number per trial SSR, split into shot and projection noise"""
    sigma_psn: float
    sigma_qpn: float

    @property
    def sigma_total(self) -> float:
        return math.hypot(self.sigma_psn, self.sigma_qpn)

    @property
    def qpn_std_fraction(self) -> float:
        total = self.sigma_total
        return self.sigma_qpn / total if total else 0.0

    @property
    def qpn_variance_fraction(self) -> float:
        total = self.sigma_total
        return (self.sigma_qpn / total) ** 2 if total else 0.0


def snr_standard(model: StdReadoutModel) -> float:
    contrast = model.c_bright - model.c_dark
    return math.sqrt(model.photons / 2.0) * contrast / math.hypot(model.c_bright, model.c_dark)


def snr_ssr(model: SsrModel) -> float:
    spread = model.f_pi * (1 - model.f_pi) + model.f0 * (1 - model.f0)
    return abs(model.f0 - model.f_pi) * math.sqrt(model.repetitions) / math.sqrt(spread)


def flip_probability(model: SsrModel, p0: float) -> float:
    """Nuclear flip probability for electron population p0"""
    if not 0.0 <= p0 <= 1.0:
        raise DomainError(f"p0 must lie in [0, 1], got {p0}")
    return (model.f0 - model.f_pi) * p0 + model.f_pi


def noise_budget(model: SsrModel, p0: float, p_ssr: float) -> NoiseBudget:
    if not 0.0 <= p0 <= 1.0 or not 0.0 <= p_ssr <= 1.0:
        raise DomainError("Probabilities must lie in [0, 1]")
    psn = (model.mu_bright * p0 + model.mu_dark * (1.0 - p0)) / (2.0 * model.readouts)
    qpn = (model.mu_bright - model.mu_dark) ** 2 * p_ssr * (1.0 - p_ssr)
    return NoiseBudget(math.sqrt(psn), math.sqrt(qpn))


def readout_variance(model: SsrModel, p0: float) -> float:
    """
    Photon shot noise of one SSR expressed as a variance of the electron population.
    Counts map to flip probability with slope mu_bright - mu_dark and flip probability
    to p0 with slope f0 - f_pi.
    """
    budget = noise_budget(model, p0, flip_probability(model, p0))
    slope = (model.mu_bright - model.mu_dark) * (model.f0 - model.f_pi)
    return budget.sigma_psn ** 2 / slope ** 2
