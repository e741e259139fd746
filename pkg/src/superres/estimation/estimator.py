"""
Frequency-separation estimator and error propagation from a measured contrast
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.optimize import brentq

from ..core.errors import DomainError
from ..core.model import EffectiveSignal
from ..core.units import rad_to_hz
from ..sensing.probability import half_sinc, transition_probability_partials
from ..sensing.special import one_minus_j0_product

logger = logging.getLogger(__name__)

APPROX_MAX_FRACTION = 0.1
APPROX_MIN_CONTRAST = 0.5
GRID_POINTS = 2000

TABLE_COLUMNS = ['actual_dr_hz', 'mean_C', 'dC', 'est_dr_hz', 'dDr_dC_hz', 'dDr_dds_hz',
                 'dDr_dOmega_hz', 'dDr_total_hz']


class Method(str, Enum):
    APPROX = 'approx'
    EXACT = 'exact'
    AUTO = 'auto'


@dataclass(frozen=True)
class DeltaREstimate:
    """
    Estimated delta_r in rad/s. status is 'ok', 'floor' (contrast at or above the
    delta_r = 0 value) or 'no_root'.
    """
    value: float
    method: Method
    valid: bool = True
    ambiguous: bool = False
    roots: Tuple[float, ...] = ()
    status: str = 'ok'


@dataclass(frozen=True)
class EstimateRecord:
    contrast: float
    d_contrast: float
    delta_r_hat: float
    from_contrast: float
    from_delta_s: float
    from_amplitude: float
    method: Method
    diverged: bool = False
    estimate: Optional[DeltaREstimate] = field(default=None, compare=False)

    @property
    def total(self) -> float:
        return math.sqrt(self.from_contrast ** 2 + self.from_delta_s ** 2
                         + self.from_amplitude ** 2)


def contrast_curve(amplitude: float, delta_s: float, t: float, delta_rs):
    """C(delta_r) = J0(x1) J0(x2) on a grid of delta_r"""
    delta_rs = np.asarray(delta_rs, dtype=float)
    x1 = 4.0 * amplitude * half_sinc(delta_s - delta_rs, t)
    x2 = 4.0 * amplitude * half_sinc(delta_s + delta_rs, t)
    return 1.0 - one_minus_j0_product(x1, x2)


def _approx(contrast: float, amplitude: float, delta_s: float, t: float) -> DeltaREstimate:
    value = abs(delta_s) / (amplitude * t) * math.sqrt(max(0.0, 0.5 * (1.0 - contrast)))
    valid = value <= APPROX_MAX_FRACTION * abs(delta_s) and contrast >= APPROX_MIN_CONTRAST
    return DeltaREstimate(value, Method.APPROX, valid=valid)


def _exact(contrast: float, amplitude: float, delta_s: float, t: float,
           hint: Optional[float], grid_points: int) -> DeltaREstimate:
    upper = 0.5 * abs(delta_s)
    floor = float(contrast_curve(amplitude, delta_s, t, 0.0))
    if contrast >= floor:
        status = 'ok' if contrast == floor else 'floor'
        return DeltaREstimate(0.0, Method.EXACT, roots=(0.0,), status=status)

    grid = np.linspace(0.0, upper, grid_points + 1)
    residual = contrast_curve(amplitude, delta_s, t, grid) - contrast

    def f(delta_r):
        return float(contrast_curve(amplitude, delta_s, t, delta_r)) - contrast

    roots: List[float] = []
    for index in range(grid_points):
        left, right = residual[index], residual[index + 1]
        if right == 0.0:
            roots.append(float(grid[index + 1]))
        elif left * right < 0.0:
            roots.append(brentq(f, grid[index], grid[index + 1], xtol=1e-15 * upper,
                                rtol=4 * np.finfo(float).eps, maxiter=200))
    if not roots:
        logger.debug("No delta_r in (0, %.6g] gives contrast %.6g", upper, contrast)
        return DeltaREstimate(math.nan, Method.EXACT, valid=False, status='no_root')

    if hint is None:
        chosen = roots[0]
    else:
        chosen = min(roots, key=lambda root: abs(root - abs(hint)))
    if len(roots) > 1:
        logger.debug("Contrast %.6g has %d roots; chose %.6g rad/s", contrast, len(roots), chosen)
    return DeltaREstimate(chosen, Method.EXACT, ambiguous=len(roots) > 1, roots=tuple(roots))


def estimate_delta_r(contrast: float, amplitude: float, delta_s: float, t: float,
                     method: Method = Method.EXACT, hint: Optional[float] = None,
                     grid_points: int = GRID_POINTS) -> DeltaREstimate:
    """
    Invert a measured contrast for delta_r.

    APPROX uses the superresolution closed form. EXACT searches (0, delta_s/2] for every
    sign change of C(delta_r) - C and refines each with Brent's method; the first root wins
    unless hint selects the nearest one.
    """
    # contrasts above the delta_r = 0 value come from noise and map to the floor
    if not contrast > -1.0:
        raise DomainError(f"Contrast must exceed -1, got {contrast}")
    if amplitude <= 0 or t <= 0 or delta_s == 0:
        raise DomainError("Estimation needs positive amplitude and time and nonzero delta_s")
    method = Method(method)
    if method is Method.APPROX:
        return _approx(contrast, amplitude, delta_s, t)
    return _exact(contrast, amplitude, delta_s, t, hint, grid_points)


def _approx_components(contrast, d_contrast, amplitude, d_amplitude, delta_s, d_delta_s, t,
                       delta_r_hat):
    gap = max(1.0 - contrast, 1e-300)
    from_contrast = abs(delta_s) * d_contrast / (2.0 * math.sqrt(2.0) * amplitude * t
                                                 * math.sqrt(gap))
    from_delta_s = delta_r_hat * d_delta_s / abs(delta_s)
    from_amplitude = delta_r_hat * d_amplitude / amplitude
    return from_contrast, from_delta_s, from_amplitude


def _exact_components(d_contrast, amplitude, d_amplitude, delta_s, d_delta_s, t, delta_r_hat):
    eff = EffectiveSignal.from_detunings(amplitude, abs(delta_s), delta_r_hat)
    partials = transition_probability_partials(eff, t)
    # C = 1 - 2P; implicit derivatives of delta_r(C, delta_s, A)
    slope = -2.0 * partials.d_delta_r
    if slope == 0.0:
        return None
    from_contrast = abs(d_contrast / slope)
    from_delta_s = abs(2.0 * partials.d_delta_s / slope) * d_delta_s
    from_amplitude = abs(2.0 * partials.d_amplitude / slope) * d_amplitude
    return from_contrast, from_delta_s, from_amplitude


def propagate_uncertainty(contrast: float, d_contrast: float, amplitude: float,
                          d_amplitude: float, delta_s: float, d_delta_s: float, t: float,
                          method: Method = Method.AUTO,
                          hint: Optional[float] = None) -> EstimateRecord:
    """
    Estimate delta_r and propagate the contrast, delta_s and amplitude uncertainties
    in quadrature.

    AUTO estimates with EXACT and takes the closed-form APPROX partials while the approximate
    estimate is valid, the implicit partials of the Bessel product otherwise.
    """
    if min(d_contrast, d_amplitude, d_delta_s) < 0:
        raise DomainError("Uncertainties must be non-negative")
    method = Method(method)
    approx = estimate_delta_r(contrast, amplitude, delta_s, t, Method.APPROX)
    if method is Method.APPROX:
        estimate = approx
        components_method = Method.APPROX
    else:
        estimate = estimate_delta_r(contrast, amplitude, delta_s, t, Method.EXACT, hint)
        components_method = Method.APPROX if method is Method.AUTO and approx.valid \
            else Method.EXACT

    diverged = (1.0 - contrast) < d_contrast
    components = None
    if components_method is Method.EXACT and estimate.status == 'ok' and estimate.value > 0:
        components = _exact_components(d_contrast, amplitude, d_amplitude, delta_s, d_delta_s,
                                       t, estimate.value)
    if components is None:
        if components_method is Method.EXACT:
            diverged = True
            components_method = Method.APPROX
        reference = estimate.value if math.isfinite(estimate.value) else approx.value
        components = _approx_components(contrast, d_contrast, amplitude, d_amplitude, delta_s,
                                        d_delta_s, t, reference)
    if diverged:
        logger.debug("Contrast uncertainty term diverges at C=%.6g (dC=%.3g)", contrast,
                     d_contrast)
    return EstimateRecord(contrast, d_contrast, estimate.value, *components,
                          method=components_method, diverged=diverged, estimate=estimate)


def records_frame(actual_delta_rs: Sequence[float],
                  records: Sequence[EstimateRecord]) -> pd.DataFrame:
    """Table of estimates with frequencies in Hz"""
    rows = []
    for actual, record in zip(actual_delta_rs, records):
        rows.append({
            'actual_dr_hz': rad_to_hz(actual),
            'mean_C': record.contrast,
            'dC': record.d_contrast,
            'est_dr_hz': rad_to_hz(record.delta_r_hat),
            'dDr_dC_hz': rad_to_hz(record.from_contrast),
            'dDr_dds_hz': rad_to_hz(record.from_delta_s),
            'dDr_dOmega_hz': rad_to_hz(record.from_amplitude),
            'dDr_total_hz': rad_to_hz(record.total),
            'method': record.method.value,
            'diverged': record.diverged,
        })
    return pd.DataFrame(rows, columns=TABLE_COLUMNS + ['method', 'diverged'])
