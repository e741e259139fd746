"""
Smallest resolvable separation: the fixed point crb(delta_r) = delta_r
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from ..core.errors import DomainError
from ..core.model import EffectiveSignal
from .fisher import NoiseKind, NoiseModel, fisher_information

logger = logging.getLogger(__name__)

LOWER_BOUND = 1e-3
GRID_POINTS = 400


@dataclass(frozen=True)
class ResolutionResult:
    """delta_star in rad/s; resolved is False when the bound never drops below delta_r"""
    delta_star: float
    resolved: bool
    crb_at_star: float = math.nan


def resolution_limit(amplitude: float, delta_s: float, t: float, decay_rate: float,
                     n_exp: int, noise: Optional[NoiseModel] = None,
                     lower: float = LOWER_BOUND, grid_points: int = GRID_POINTS) -> ResolutionResult:
    """
    Solve crb(delta_r) = delta_r on [lower, |delta_s|].

    The bound uses the decohered probability with decay_rate unless another noise model
    is given. The first crossing on a log grid is refined by Brent's method in log space.
    """
    if decay_rate < 0:
        raise DomainError(f"Decay rate must be non-negative, got {decay_rate}")
    if delta_s == 0 or n_exp < 1:
        raise DomainError("Resolution limit needs delta_s != 0 and n_exp >= 1")
    noise = noise or NoiseModel.decoherence(decay_rate)
    rate = 0.0 if noise.kind is NoiseKind.DECOHERENCE else decay_rate
    base = EffectiveSignal.from_detunings(amplitude, delta_s, 0.0)

    def gap(log_delta):
        delta_r = math.exp(log_delta)
        crb = fisher_information(base.with_delta_r(delta_r), t, rate, noise, n_exp).crb_std
        return math.log(crb) - log_delta if math.isfinite(crb) else math.inf

    grid = np.linspace(math.log(lower), math.log(abs(delta_s)), grid_points)
    start = gap(grid[0])
    if start <= 0:
        logger.debug("Bound already below delta_r at the grid start")
        return ResolutionResult(lower, True, math.exp(start) * lower)
    for left, right in zip(grid[:-1], grid[1:]):
        current = gap(right)
        if current <= 0:
            log_star = brentq(gap, left, right, xtol=1e-12)
            star = math.exp(log_star)
            logger.debug("Resolution limit %.6g rad/s", star)
            return ResolutionResult(star, True, math.exp(gap(log_star)) * star)
    return ResolutionResult(math.nan, False)
