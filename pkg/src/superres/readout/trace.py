"""
Quantum-jump traces of the nuclear spin seen through repetitive readout
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np
from scipy import stats

from ..core.errors import ConfigError, FitError
from ..core.rng import stream_generator

logger = logging.getLogger(__name__)

UP, DOWN = 1, 0


@dataclass(frozen=True)
class SsrTraceModel:
    """
    Generative model of normalized counts I_norm = (I1 - I2) / (I1 + I2).

    The R readouts of one shot are split into two halves summed into I1 and I2; with the
    nuclear spin up, I1 collects the bright photons. excess_noise is extra Gaussian noise on
    I_norm from sources outside photon statistics. Defaults give an assignment fidelity of
    about 0.9969.
    """
    photons_bright: float = 0.30
    photons_dark: float = 0.17
    readouts: int = 700
    excess_noise: float = 0.0678
    shot_time: float = 20.0 / 4400
    lifetime_up: float = 60e-3
    lifetime_down: float = 60e-3

    def __post_init__(self):
        if not self.photons_bright > self.photons_dark >= 0:
            raise ConfigError("Expected photons_bright > photons_dark >= 0")
        if self.readouts < 2 or self.shot_time <= 0 or self.excess_noise < 0:
            raise ConfigError("Invalid trace model timing or noise")
        if not (self.lifetime_up > 0 and self.lifetime_down > 0):
            raise ConfigError("Lifetimes must be positive")

    def mode_statistics(self):
        """Delta-method mean and std of I_norm for the up state"""
        half = self.readouts / 2.0
        lam_1 = half * self.photons_bright
        lam_2 = half * self.photons_dark
        total = lam_1 + lam_2
        mean = (lam_1 - lam_2) / total
        photon_var = 4.0 * lam_1 * lam_2 / total ** 3
        return mean, math.sqrt(photon_var + self.excess_noise ** 2)

    def predicted_fidelity(self) -> float:
        mean, std = self.mode_statistics()
        return float(stats.norm.cdf(mean / std))


@dataclass
class SsrTrace:
    i_norm: np.ndarray
    states: np.ndarray
    up_fraction: np.ndarray
    redraws: int = 0


def _occupancy(model: SsrTraceModel, n_shots: int, state: int, rng) -> np.ndarray:
    """Fraction of each shot spent in the up state, from an exact jump simulation"""
    horizon = n_shots * model.shot_time
    knots = [0.0]
    up_time = [0.0]
    now = 0.0
    while now < horizon:
        lifetime = model.lifetime_up if state == UP else model.lifetime_down
        stay = rng.exponential(lifetime) if math.isfinite(lifetime) else math.inf
        end = min(now + stay, horizon)
        up_time.append(up_time[-1] + (end - now if state == UP else 0.0))
        knots.append(end)
        now = end
        state = DOWN if state == UP else UP
    boundaries = np.arange(n_shots + 1) * model.shot_time
    cumulative = np.interp(boundaries, knots, up_time)
    return np.clip(np.diff(cumulative) / model.shot_time, 0.0, 1.0)


def simulate_ssr_trace(model: SsrTraceModel, n_shots: int, seed: int,
                       initial_state: Optional[int] = None, stream_id: int = 0) -> SsrTrace:
    if n_shots < 1:
        raise ConfigError(f"n_shots must be >= 1, got {n_shots}")
    rng = stream_generator(seed, stream_id)
    state = int(rng.integers(2)) if initial_state is None else int(initial_state)
    up_fraction = _occupancy(model, n_shots, state, rng)

    half = model.readouts / 2.0
    rate_1 = half * (up_fraction * model.photons_bright + (1 - up_fraction) * model.photons_dark)
    rate_2 = half * (up_fraction * model.photons_dark + (1 - up_fraction) * model.photons_bright)
    counts_1 = rng.poisson(rate_1).astype(float)
    counts_2 = rng.poisson(rate_2).astype(float)
    redraws = 0
    empty = counts_1 + counts_2 == 0
    while np.any(empty):
        redraws += int(empty.sum())
        counts_1[empty] = rng.poisson(rate_1[empty])
        counts_2[empty] = rng.poisson(rate_2[empty])
        empty = counts_1 + counts_2 == 0
    if redraws:
        logger.debug("Re-drew %d empty readouts", redraws)

    i_norm = (counts_1 - counts_2) / (counts_1 + counts_2)
    i_norm += rng.normal(0.0, model.excess_noise, n_shots) if model.excess_noise else 0.0
    states = (up_fraction >= 0.5).astype(int)
    return SsrTrace(i_norm, states, up_fraction, redraws)


def sample_mixture(model: SsrTraceModel, n_samples: int, seed: int, stream_id: int = 0):
    """Independent draws from the Gaussian approximation of both modes"""
    rng = stream_generator(seed, stream_id)
    mean, std = model.mode_statistics()
    states = rng.integers(2, size=n_samples)
    return np.where(states == UP, mean, -mean) + rng.normal(0.0, std, n_samples), states


def digitize(i_norm, threshold: float = 0.0, hysteresis: float = 0.0) -> np.ndarray:
    """
    Binary nuclear state per shot (1 = up).
    With hysteresis > 0 the state only changes when the count leaves the band
    threshold +/- hysteresis.
    """
    values = np.asarray(i_norm, dtype=float)
    if hysteresis <= 0:
        return (values > threshold).astype(int)
    states = np.empty(values.size, dtype=int)
    state = int(values[0] > threshold) if values.size else UP
    upper, lower = threshold + hysteresis, threshold - hysteresis
    for index, value in enumerate(values):
        if value > upper:
            state = UP
        elif value < lower:
            state = DOWN
        states[index] = state
    return states


def dwell_runs(states) -> Dict[int, np.ndarray]:
    """Run lengths in shots per state; the censored first and last runs are dropped"""
    states = np.asarray(states, dtype=int)
    if states.size == 0:
        return {UP: np.array([], dtype=int), DOWN: np.array([], dtype=int)}
    edges = np.flatnonzero(np.diff(states)) + 1
    starts = np.concatenate(([0], edges))
    lengths = np.diff(np.concatenate((starts, [states.size])))
    values = states[starts]
    lengths, values = lengths[1:-1], values[1:-1]
    return {UP: lengths[values == UP], DOWN: lengths[values == DOWN]}


def dwell_times(states, shot_time: float) -> Dict[int, np.ndarray]:
    return {state: runs * shot_time for state, runs in dwell_runs(states).items()}


@dataclass(frozen=True)
class LifetimeFit:
    lifetime: float
    std_error: float
    n_dwells: int
    ks_pvalue: float


def fit_lifetime(dwells, shot_time: float, min_shots: int = 1) -> LifetimeFit:
    """
    Exponential lifetime from dwell times sampled once per shot.

    Dwells shorter than min_shots are discarded; the remaining run lengths are geometric,
    so the per-shot switching probability has a closed-form MLE that is converted back to a
    continuous lifetime.
    """
    runs = np.rint(np.asarray(dwells, dtype=float) / shot_time).astype(int)
    runs = runs[runs >= min_shots] - min_shots + 1
    if runs.size < 2:
        raise FitError(f"Need at least two dwells of >= {min_shots} shots, got {runs.size}")
    switch = 1.0 / runs.mean()
    if switch >= 1.0:
        raise FitError("Every dwell lasts a single shot; lifetime is unresolved")
    log_stay = math.log1p(-switch)
    lifetime = -shot_time / log_stay
    switch_se = switch * math.sqrt((1.0 - switch) / runs.size)
    lifetime_se = shot_time * switch_se / ((1.0 - switch) * log_stay ** 2)
    # KS distance evaluated on the integer support of the run lengths
    support = np.arange(1, runs.max() + 1)
    empirical = np.searchsorted(np.sort(runs), support, side='right') / runs.size
    distance = float(np.max(np.abs(empirical - stats.geom(switch).cdf(support))))
    pvalue = float(stats.kstwo.sf(distance, runs.size))
    logger.debug("Lifetime %.4g s +/- %.2g from %d dwells", lifetime, lifetime_se, runs.size)
    return LifetimeFit(lifetime, lifetime_se, int(runs.size), pvalue)
