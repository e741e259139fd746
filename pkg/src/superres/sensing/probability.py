"""
Closed-form transition probabilities for two incoherent tones.

The phase-averaged probability is P = 1/2 [1 - J0(x1) J0(x2)] with
x_i = 4 A_i sin(delta_i t / 2) / delta_i. Everything here works on scalars or
numpy arrays of times.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import curve_fit

from ..core.errors import DomainError, FitError
from ..core.model import EffectiveSignal
from .special import j0, j1, j0_zero, j1_over_x, one_minus_j0, one_minus_j0_product

logger = logging.getLogger(__name__)

SERIES_CUTOFF = 0.05


@dataclass(frozen=True)
class ProbExpansion:
    """P(delta_r) ~ a_t + b_t delta_r**2 with delta_r in rad/s"""
    a_t: float
    b_t: float

    def probability(self, delta_r):
        return self.a_t + self.b_t * np.square(delta_r)


@dataclass(frozen=True)
class ContrastPoint:
    time: float
    contrast: float
    probability: float


@dataclass(frozen=True)
class ProbabilityPartials:
    """Derivatives of P with respect to delta_r, delta_s and the common amplitude"""
    d_delta_r: float
    d_delta_s: float
    d_amplitude: float


def _scalar(value):
    value = np.asarray(value)
    return float(value) if value.ndim == 0 else value


def half_sinc(delta, t):
    """sin(delta t / 2) / delta, equal to t/2 at delta = 0"""
    return 0.5 * t * np.sinc(delta * t / (2.0 * np.pi))


def half_sinc_derivative(delta, t):
    """d/d(delta) of sin(delta t / 2) / delta"""
    delta = np.asarray(delta, dtype=float)
    t = np.asarray(t, dtype=float)
    u = delta * t
    small = np.abs(u) < SERIES_CUTOFF
    u2 = u * u
    series = t * t * u * (-1.0 / 24.0 + u2 / 960.0 - u2 * u2 / 107520.0)
    safe = np.where(small, 1.0, delta)
    with np.errstate(invalid='ignore', divide='ignore'):
        direct = (u * np.cos(0.5 * u) - 2.0 * np.sin(0.5 * u)) / (2.0 * safe * safe)
    return np.where(small, series, direct)


def bessel_arguments(eff: EffectiveSignal, t):
    """Bessel arguments (x1, x2) at time(s) t"""
    t = np.asarray(t, dtype=float)
    x1 = 4.0 * eff.amp_eff_1 * half_sinc(eff.delta_1, t)
    x2 = 4.0 * eff.amp_eff_2 * half_sinc(eff.delta_2, t)
    return x1, x2


def transition_probability(eff: EffectiveSignal, t):
    """Phase-averaged transition probability at time(s) t"""
    if np.any(np.asarray(t) < 0):
        raise DomainError("Interrogation time must be non-negative")
    x1, x2 = bessel_arguments(eff, t)
    return _scalar(0.5 * one_minus_j0_product(x1, x2))


def transition_probability_decohered(eff: EffectiveSignal, t, decay_rate: float):
    """Transition probability with the Bessel product damped by exp(-decay_rate t)"""
    if decay_rate < 0:
        raise DomainError(f"Decay rate must be non-negative, got {decay_rate}")
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("Interrogation time must be non-negative")
    x1, x2 = bessel_arguments(eff, t)
    damping = np.exp(-decay_rate * t)
    return _scalar(0.5 * (-np.expm1(-decay_rate * t) + damping * one_minus_j0_product(x1, x2)))


def contrast(probability: float, time: float = float('nan')) -> ContrastPoint:
    if not 0.0 <= probability <= 1.0:
        raise DomainError(f"Probability must lie in [0, 1], got {probability}")
    return ContrastPoint(time, 1.0 - 2.0 * probability, probability)


def contrast_probability(eff: EffectiveSignal, t: float) -> ContrastPoint:
    return contrast(transition_probability(eff, t), t)


def _sync_terms(u):
    """(u cos(u/2) - 2 sin(u/2))**2 and u**2 - 2 + 2 cos(u), both free of cancellation"""
    u = np.asarray(u, dtype=float)
    u2 = u * u
    small = np.abs(u) < SERIES_CUTOFF
    slope = np.where(small, u * u2 * (-1.0 / 12.0 + u2 / 480.0 - u2 * u2 / 53760.0),
                     u * np.cos(0.5 * u) - 2.0 * np.sin(0.5 * u))
    curvature = np.where(small, u2 * u2 * (1.0 / 12.0 - u2 / 360.0 + u2 * u2 / 20160.0),
                         u2 - 2.0 + 2.0 * np.cos(u))
    return slope * slope, curvature


def expansion_coefficients(amplitude: float, delta_s: float, t) -> ProbExpansion:
    """
    Second-order expansion of P in delta_r for equal amplitudes.

    Uses the rearrangement
        b_t = 2 A^2 / delta_s^4 [(J0^2 + J1^2) (u c - 2 s)^2 - J0 J1(X)/X (u^2 - 2 + 2 cos u)]
    with u = delta_s t, s = sin(u/2), c = cos(u/2), X = 4 A s / delta_s. It has no removable
    singularity at the superresolution times, where it gives b_t = A^2 t^2 / delta_s^2.
    """
    if delta_s == 0:
        raise DomainError("Expansion requires delta_s != 0")
    t = np.asarray(t, dtype=float)
    x = 4.0 * amplitude * half_sinc(delta_s, t)
    bessel_0 = j0(x)
    bessel_1 = j1(x)
    a_t = 0.5 * one_minus_j0(x) * (1.0 + bessel_0)
    slope_sq, curvature = _sync_terms(delta_s * t)
    b_t = (2.0 * amplitude ** 2 / delta_s ** 4) * (
        (bessel_0 ** 2 + bessel_1 ** 2) * slope_sq - bessel_0 * j1_over_x(x) * curvature)
    if np.ndim(t) == 0:
        return ProbExpansion(float(a_t), float(b_t))
    return ProbExpansion(a_t, b_t)


def expansion_for(eff: EffectiveSignal, t) -> ProbExpansion:
    """Expansion at the signal's delta_s; requires equal amplitudes"""
    return expansion_coefficients(eff.amplitude, eff.delta_s, t)


def small_delta_r_probability(amplitude: float, delta_s: float, t, delta_r):
    """
    Superresolution approximation P ~ A^2 t^2 delta_r^2 / delta_s^2.
    At t = 2 pi / delta_s this is (A t / 2 pi)^2 delta_r^2 t^2.
    """
    if delta_s == 0:
        raise DomainError("Approximation requires delta_s != 0")
    return _scalar(np.square(amplitude * np.asarray(t) * np.asarray(delta_r) / delta_s))


def transition_probability_partials(eff: EffectiveSignal, t: float) -> ProbabilityPartials:
    """Analytic first derivatives of P, used by the exact uncertainty propagation"""
    x1, x2 = bessel_arguments(eff, t)
    weight_1 = float(j1(x1) * j0(x2))
    weight_2 = float(j0(x1) * j1(x2))
    dx1_ddelta = 4.0 * eff.amp_eff_1 * float(half_sinc_derivative(eff.delta_1, t))
    dx2_ddelta = 4.0 * eff.amp_eff_2 * float(half_sinc_derivative(eff.delta_2, t))
    dx1_damp = 4.0 * float(half_sinc(eff.delta_1, t))
    dx2_damp = 4.0 * float(half_sinc(eff.delta_2, t))
    # delta_1 = delta_s - delta_r, delta_2 = delta_s + delta_r
    return ProbabilityPartials(
        d_delta_r=0.5 * (-weight_1 * dx1_ddelta + weight_2 * dx2_ddelta),
        d_delta_s=0.5 * (weight_1 * dx1_ddelta + weight_2 * dx2_ddelta),
        d_amplitude=0.5 * (weight_1 * dx1_damp + weight_2 * dx2_damp),
    )


def calibration_probability(amplitude: float, t, tones: int = 1):
    """Resonant calibration curve for one tone or two equal tones"""
    x = 2.0 * amplitude * np.asarray(t, dtype=float)
    if tones == 1:
        return _scalar(0.5 * one_minus_j0(x))
    if tones == 2:
        return _scalar(0.5 * one_minus_j0(x) * (1.0 + j0(x)))
    raise DomainError(f"tones must be 1 or 2, got {tones}")


def first_contrast_zero(amplitude: float) -> float:
    """Earliest time at which the resonant calibration contrast vanishes"""
    if amplitude <= 0:
        raise DomainError("Amplitude must be positive")
    return j0_zero(1) / (2.0 * amplitude)


@dataclass(frozen=True)
class CalibrationFit:
    amplitude: float
    amplitude_std: float
    tones: int
    residual_rms: float


def fit_calibration(times: Sequence[float], probabilities: Sequence[float], tones: int = 1,
                    sigma: Optional[Sequence[float]] = None,
                    initial: Optional[float] = None) -> CalibrationFit:
    """Least-squares fit of the effective amplitude from a calibration curve"""
    times = np.asarray(times, dtype=float)
    probabilities = np.asarray(probabilities, dtype=float)
    if times.shape != probabilities.shape or times.size < 2:
        raise FitError("Calibration fit needs matching time and probability arrays")

    def model(t, amplitude):
        return calibration_probability(amplitude, t, tones)

    if initial is None:
        # Coarse scan so curve_fit starts on the right lobe
        horizon = times.max()
        candidates = np.geomspace(0.05, 50.0, 400) / horizon
        errors = [np.sum((model(times, a) - probabilities) ** 2) for a in candidates]
        initial = float(candidates[int(np.argmin(errors))])
        logger.debug("Calibration start value %.6g rad/s", initial)

    try:
        popt, pcov = curve_fit(model, times, probabilities, p0=[initial], sigma=sigma,
                               absolute_sigma=sigma is not None, maxfev=5000)
    except (RuntimeError, ValueError) as exc:
        raise FitError(f"Calibration fit did not converge: {exc}") from exc

    residual = probabilities - model(times, popt[0])
    return CalibrationFit(
        amplitude=float(popt[0]),
        amplitude_std=float(np.sqrt(pcov[0, 0])),
        tones=tones,
        residual_rms=float(np.sqrt(np.mean(residual ** 2))),
    )
