"""
Brute-force oracles for the closed forms: Monte Carlo phase averaging and
toggling-frame integration under an ideal pulse train
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ..core.errors import DomainError
from ..core.model import DdSequence, EffectiveSignal, PhaseKind, PhaseModel, TwoToneSignal
from ..core.rng import CHUNK_SIZE, chunk_plan, stream_generator
from .probability import half_sinc

logger = logging.getLogger(__name__)

MODES = ('sin2', 'bernoulli')
MIN_STEPS = 50


@dataclass(frozen=True)
class McConfig:
    n_samples: int
    seed: int = 0
    stream_id: int = 0
    mode: str = 'sin2'
    workers: int = 1
    chunk_size: int = CHUNK_SIZE

    def __post_init__(self):
        if self.n_samples < 1:
            raise DomainError(f"n_samples must be >= 1, got {self.n_samples}")
        if self.mode not in MODES:
            raise DomainError(f"Unknown sampling mode {self.mode!r}")
        if self.seed < 0 or self.stream_id < 0:
            raise DomainError("seed and stream_id must be unsigned")


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    n_samples: int

    def deviation(self, reference: float) -> float:
        """|mean - reference| in units of the standard error"""
        if self.std_error == 0:
            return 0.0 if self.mean == reference else math.inf
        return abs(self.mean - reference) / self.std_error


def accumulated_phase(eff: EffectiveSignal, t: float, phi_1, phi_2):
    """
    Phase sum_i A_i [cos(phi_i) - cos(delta_i t + phi_i)] / delta_i for fixed phases,
    written as 2 A_i sin(phi_i + delta_i t/2) sin(delta_i t/2)/delta_i so delta_i = 0 is exact.
    """
    phase_1 = 2.0 * eff.amp_eff_1 * np.sin(np.asarray(phi_1) + 0.5 * eff.delta_1 * t) \
        * half_sinc(eff.delta_1, t)
    phase_2 = 2.0 * eff.amp_eff_2 * np.sin(np.asarray(phi_2) + 0.5 * eff.delta_2 * t) \
        * half_sinc(eff.delta_2, t)
    total = phase_1 + phase_2
    return float(total) if np.ndim(total) == 0 else total


def _reduce(chunks) -> Tuple[float, float, int]:
    """Order-independent mean and sum of squared deviations from per-chunk moments"""
    n_total = sum(n for n, _, _ in chunks)
    mean = math.fsum(s for _, s, _ in chunks) / n_total
    m2 = math.fsum(m for _, _, m in chunks) \
        + math.fsum(n * (s / n - mean) ** 2 for n, s, _ in chunks)
    return mean, m2, n_total


def summarize(chunks) -> McEstimate:
    mean, m2, n = _reduce(chunks)
    if n < 2:
        return McEstimate(mean, math.nan, n)
    return McEstimate(mean, math.sqrt(m2 / (n - 1) / n), n)


def run_chunks(sampler, mc: McConfig):
    sizes = chunk_plan(mc.n_samples, mc.chunk_size)

    def run(index):
        rng = stream_generator(mc.seed, mc.stream_id, index)
        values = sampler(rng, sizes[index])
        chunk_sum = math.fsum(values)
        deviations = values - chunk_sum / sizes[index]
        return sizes[index], chunk_sum, math.fsum(deviations * deviations)

    if mc.workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=mc.workers) as pool:
            return list(pool.map(run, range(len(sizes))))
    return [run(index) for index in range(len(sizes))]


def mc_transition_probability(eff: EffectiveSignal, t: float, mc: McConfig,
                              phase_model: PhaseModel = PhaseModel()) -> McEstimate:
    """Average sin^2 of the accumulated phase over random tone phases"""
    if phase_model.kind is PhaseKind.FIXED:
        probability = math.sin(accumulated_phase(eff, t, *phase_model.phases)) ** 2
        if mc.mode == 'sin2':
            return McEstimate(probability, 0.0, mc.n_samples)

        def sampler(rng, size):
            return (rng.random(size) < probability).astype(float)
    else:
        def sampler(rng, size):
            phases = rng.uniform(0.0, 2.0 * np.pi, size=(2, size))
            probability = np.sin(accumulated_phase(eff, t, phases[0], phases[1])) ** 2
            if mc.mode == 'bernoulli':
                return (rng.random(size) < probability).astype(float)
            return probability

    estimate = summarize(run_chunks(sampler, mc))
    logger.debug("MC P=%.6g +/- %.2g (n=%d, mode=%s)", estimate.mean, estimate.std_error,
                 estimate.n_samples, mc.mode)
    return estimate


def toggling_phase_map(phi_lab):
    """Lab-frame tone phase to the phase used by accumulated_phase"""
    return 0.5 * np.pi - np.asarray(phi_lab)


def _simpson_weights(steps: int) -> np.ndarray:
    weights = np.ones(steps + 1)
    weights[1:-1:2] = 4.0
    weights[2:-1:2] = 2.0
    return weights / 3.0


def toggling_trajectory(signal: TwoToneSignal, dd: DdSequence, phi_1: float, phi_2: float,
                        steps_per_period: int = 100) -> np.ndarray:
    """
    Accumulated phase at every pulse time 0, tau, ..., N tau.

    Integrates m(t) sum_i Omega_i sin(omega_i t + phi_i) with m = (-1)^k on [k tau, (k+1) tau),
    composite Simpson on each inter-pulse interval.
    """
    if steps_per_period < MIN_STEPS:
        raise DomainError(f"steps_per_period must be >= {MIN_STEPS}, got {steps_per_period}")
    if steps_per_period % 2:
        raise DomainError("steps_per_period must be even so Simpson panels end on pulses")
    tau = dd.pulse_spacing
    h = tau / steps_per_period
    weights = _simpson_weights(steps_per_period) * h
    offsets = np.arange(steps_per_period + 1) * h

    integrals = np.empty(dd.pulse_count)
    block = max(1, 200000 // (steps_per_period + 1))
    for start in range(0, dd.pulse_count, block):
        k = np.arange(start, min(start + block, dd.pulse_count))
        grid = k[:, None] * tau + offsets[None, :]
        values = signal.amplitude_1 * np.sin(signal.omega_1 * grid + phi_1) \
            + signal.amplitude_2 * np.sin(signal.omega_2 * grid + phi_2)
        integrals[k] = values @ weights
    signs = np.where(np.arange(dd.pulse_count) % 2 == 0, 1.0, -1.0)
    return np.concatenate(([0.0], np.cumsum(signs * integrals)))


def toggling_integration(signal: TwoToneSignal, dd: DdSequence, phi_1: float, phi_2: float,
                         steps_per_period: int = 100) -> float:
    """Lab-frame accumulated phase at the end of the pulse train"""
    return float(toggling_trajectory(signal, dd, phi_1, phi_2, steps_per_period)[-1])
