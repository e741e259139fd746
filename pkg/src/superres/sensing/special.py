"""
Bessel helpers with cancellation-free small-argument branches.

J0 and J1 come from scipy.special (Cephes), accurate to about 1e-15 absolute
for |x| <= 30. The helpers below avoid the loss of digits in 1 - J0(x) and
J1(x)/x near x = 0, where the protocol operates.
"""

import numpy as np
from scipy import special

SERIES_CUTOFF = 0.1


def j0(x):
    return special.j0(x)


def j1(x):
    return special.j1(x)


def one_minus_j0(x):
    """1 - J0(x) to full relative precision"""
    x = np.asarray(x, dtype=float)
    q = 0.25 * x * x
    # q - q^2/4 + q^3/36 - q^4/576
    series = q * (1.0 - q / 4.0 * (1.0 - q / 9.0 * (1.0 - q / 16.0)))
    with np.errstate(invalid='ignore'):
        direct = 1.0 - special.j0(x)
    result = np.where(np.abs(x) < SERIES_CUTOFF, series, direct)
    return result[()] if result.ndim == 0 else result


def j1_over_x(x):
    """J1(x)/x with the limit 1/2 at x = 0"""
    x = np.asarray(x, dtype=float)
    q = 0.25 * x * x
    series = 0.5 * (1.0 - q / 2.0 * (1.0 - q / 6.0 * (1.0 - q / 12.0)))
    small = np.abs(x) < SERIES_CUTOFF
    with np.errstate(invalid='ignore', divide='ignore'):
        direct = special.j1(x) / np.where(small, 1.0, x)
    result = np.where(small, series, direct)
    return result[()] if result.ndim == 0 else result


def one_minus_j0_product(x1, x2):
    """1 - J0(x1) J0(x2) without cancellation when both arguments are small"""
    return one_minus_j0(x1) + special.j0(x1) * one_minus_j0(x2)


def j0_zero(k: int = 1) -> float:
    """k-th positive root of J0"""
    return float(special.jn_zeros(0, k)[-1])
