"""
Double-Gaussian fits of normalized-count histograms
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy import stats
from scipy.optimize import brentq, curve_fit

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DoubleGaussianFit:
    """Two-component fit; index 0 is the low (dark) mode, index 1 the high (bright) mode"""
    means: Tuple[float, float]
    widths: Tuple[float, float]
    weights: Tuple[float, float]
    threshold: float
    fidelity: float
    converged: bool = True
    message: str = ''


def histogram(values, bins: int = 100, value_range: Optional[Tuple[float, float]] = None):
    """Bin centers and counts"""
    counts, edges = np.histogram(np.asarray(values, dtype=float), bins=bins, range=value_range)
    return 0.5 * (edges[:-1] + edges[1:]), counts


def _mixture(x, a1, m1, s1, a2, m2, s2):
    return a1 * stats.norm.pdf(x, m1, s1) + a2 * stats.norm.pdf(x, m2, s2)


def crossing_threshold(means, widths, weights) -> float:
    """Point between the means where the weighted densities are equal"""
    (m_low, m_high), (s_low, s_high), (w_low, w_high) = means, widths, weights

    def log_ratio(x):
        return (np.log(w_high) + stats.norm.logpdf(x, m_high, s_high)
                - np.log(w_low) - stats.norm.logpdf(x, m_low, s_low))

    return float(brentq(log_ratio, m_low, m_high))


def assignment_fidelity(means, widths, threshold: float) -> float:
    """1 minus the mean misassignment probability of the two modes"""
    (m_low, m_high), (s_low, s_high) = means, widths
    wrong_high = stats.norm.cdf(threshold, m_high, s_high)
    wrong_low = stats.norm.sf(threshold, m_low, s_low)
    return float(1.0 - 0.5 * (wrong_high + wrong_low))


def fit_double_gaussian(centers, counts, max_evaluations: int = 20000) -> DoubleGaussianFit:
    """Least-squares two-Gaussian fit with the threshold at the equal-likelihood crossing"""
    centers = np.asarray(centers, dtype=float)
    counts = np.asarray(counts, dtype=float)
    total = counts.sum()
    if centers.size == 0 or total <= 0:
        return DoubleGaussianFit((np.nan, np.nan), (np.nan, np.nan), (np.nan, np.nan),
                                 np.nan, np.nan, False, 'empty histogram')

    width = centers[1] - centers[0] if centers.size > 1 else 1.0
    cumulative = np.cumsum(counts) / total
    split = centers[np.searchsorted(cumulative, 0.5)]
    guess = []
    for mask in (centers <= split, centers > split):
        weight = counts[mask].sum()
        if weight == 0:
            mean, std = split, width
        else:
            mean = np.average(centers[mask], weights=counts[mask])
            std = np.sqrt(np.average((centers[mask] - mean) ** 2, weights=counts[mask]))
        guess.extend([weight * width, mean, max(std, width)])

    try:
        popt, _ = curve_fit(_mixture, centers, counts, p0=guess, maxfev=max_evaluations,
                            bounds=([0, -np.inf, 1e-12, 0, -np.inf, 1e-12], np.inf))
    except (RuntimeError, ValueError) as exc:
        logger.warning("Double-Gaussian fit failed: %s", exc)
        return DoubleGaussianFit((np.nan, np.nan), (np.nan, np.nan), (np.nan, np.nan),
                                 np.nan, np.nan, False, str(exc))

    components = sorted([(popt[1], popt[2], popt[0]), (popt[4], popt[5], popt[3])])
    means = (float(components[0][0]), float(components[1][0]))
    widths = (float(components[0][1]), float(components[1][1]))
    amplitude = components[0][2] + components[1][2]
    weights = (float(components[0][2] / amplitude), float(components[1][2] / amplitude))
    try:
        threshold = crossing_threshold(means, widths, weights)
    except ValueError:
        # Fall back to the midpoint when the weighted densities do not cross between the modes
        threshold = 0.5 * (means[0] + means[1])
    return DoubleGaussianFit(means, widths, weights, threshold,
                             assignment_fidelity(means, widths, threshold))
