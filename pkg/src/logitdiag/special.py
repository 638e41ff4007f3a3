"""Normal and chi-square distribution functions.

The chi-square CDF is the regularized lower incomplete gamma function
P(k/2, x/2), evaluated by its power series below ``a + 1`` and by the
Lentz continued fraction for the upper tail above it.
"""

from __future__ import annotations

import math
from statistics import NormalDist

_SQRT2 = math.sqrt(2.0)
_MAX_TERMS = 10_000
_REL_EPS = 1e-16
_TINY = 1e-300


def normal_cdf(z: float) -> float:
    """Standard normal CDF."""
    z = float(z)
    if math.isnan(z):
        raise ValueError("normal_cdf of NaN")
    # erfc keeps full relative precision in the lower tail
    return 0.5 * math.erfc(-z / _SQRT2)


def normal_sf(z: float) -> float:
    """Upper tail ``1 - Phi(z)`` without cancellation."""
    return 0.5 * math.erfc(float(z) / _SQRT2)


def normal_ppf(p: float) -> float:
    """Inverse standard normal CDF."""
    if not 0.0 < p < 1.0:
        raise ValueError("normal_ppf needs 0 < p < 1")
    return NormalDist().inv_cdf(p)


def _lower_series(a: float, x: float) -> float:
    # P(a, x) = x^a e^-x / Gamma(a+1) * sum_k x^k / ((a+1)...(a+k))
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(_MAX_TERMS):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _REL_EPS:
            break
    else:
        raise ArithmeticError(f"incomplete gamma series did not converge (a={a}, x={x})")
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _upper_continued_fraction(a: float, x: float) -> float:
    # Q(a, x) by the modified Lentz method
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_TERMS):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _REL_EPS:
            break
    else:
        raise ArithmeticError(f"incomplete gamma continued fraction did not converge (a={a}, x={x})")
    return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h


def regularized_gamma_p(a: float, x: float) -> float:
    """Regularized lower incomplete gamma ``P(a, x)``."""
    if not a > 0:
        raise ValueError("shape a must be > 0")
    if x < 0 or math.isnan(x):
        raise ValueError("x must be >= 0")
    if x == 0:
        return 0.0
    if math.isinf(x):
        return 1.0
    if x < a + 1.0:
        return min(1.0, _lower_series(a, x))
    return max(0.0, 1.0 - _upper_continued_fraction(a, x))


def regularized_gamma_q(a: float, x: float) -> float:
    """Upper complement ``Q(a, x) = 1 - P(a, x)``, accurate in the far tail."""
    if not a > 0:
        raise ValueError("shape a must be > 0")
    if x < 0 or math.isnan(x):
        raise ValueError("x must be >= 0")
    if x == 0:
        return 1.0
    if math.isinf(x):
        return 0.0
    if x < a + 1.0:
        return max(0.0, 1.0 - _lower_series(a, x))
    return min(1.0, _upper_continued_fraction(a, x))


def _check_df(df) -> float:
    if isinstance(df, bool) or int(df) != df or df < 1:
        raise ValueError(f"degrees of freedom must be a positive integer, got {df!r}")
    return float(df)


def chi_square_cdf(x: float, df: int) -> float:
    """``P(X <= x)`` for ``X ~ chi2(df)``."""
    df = _check_df(df)
    if x < 0:
        raise ValueError("chi-square statistic must be >= 0")
    return regularized_gamma_p(df / 2.0, x / 2.0)


def chi_square_sf(x: float, df: int) -> float:
    """Right-tail p-value ``P(X > x)`` for ``X ~ chi2(df)``."""
    df = _check_df(df)
    if x < 0:
        raise ValueError("chi-square statistic must be >= 0")
    return regularized_gamma_q(df / 2.0, x / 2.0)
