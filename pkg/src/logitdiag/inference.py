"""Wald tests, the likelihood-ratio G test and odds ratios."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .special import chi_square_sf, normal_ppf, normal_sf

#: Slack for ``ll_full < ll_null`` caused by rounding rather than a broken fit.
LL_SLACK = 1e-9


@dataclass(frozen=True)
class WaldRow:
    variable: str
    coefficient: float
    se: float
    z: float
    p_two_sided: float
    odds_ratio: float
    significant: bool
    or_ci_low: float
    or_ci_high: float

    def to_dict(self) -> dict:
        return {
            "variable": self.variable,
            "coefficient": self.coefficient,
            "se": self.se,
            "z": self.z,
            "p": self.p_two_sided,
            "odds_ratio": self.odds_ratio,
            "significant": self.significant,
            "odds_ratio_ci": [self.or_ci_low, self.or_ci_high],
        }


@dataclass(frozen=True)
class GTestResult:
    g: float
    df: int
    p: float
    ll_full: float
    ll_null: float

    def to_dict(self) -> dict:
        return {"g": self.g, "df": self.df, "p": self.p,
                "ll_full": self.ll_full, "ll_null": self.ll_null}


def _exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def odds_ratio(coefficient: float) -> float:
    """Multiplicative change in the odds per unit increase of a predictor."""
    if not math.isfinite(coefficient):
        raise ValueError("coefficient must be finite")
    return _exp(coefficient)


def wald_test(coefficient: float, se: float, alpha: float = 0.05, variable: str = "") -> WaldRow:
    """Two-sided Wald z test of ``coefficient == 0``.

    The coefficient is significant when ``|z|`` exceeds the upper
    ``alpha/2`` standard-normal quantile.
    """
    if not se > 0:
        raise ValueError(f"standard error must be > 0, got {se}")
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    z = coefficient / se
    p = min(1.0, 2.0 * normal_sf(abs(z)))
    crit = normal_ppf(1.0 - alpha / 2.0)
    return WaldRow(
        variable=variable,
        coefficient=coefficient,
        se=se,
        z=z,
        p_two_sided=p,
        odds_ratio=odds_ratio(coefficient),
        significant=abs(z) > crit,
        or_ci_low=_exp(coefficient - crit * se),
        or_ci_high=_exp(coefficient + crit * se),
    )


def g_test(ll_full: float, ll_null: float, df: int) -> GTestResult:
    """Likelihood-ratio test that all slopes are zero."""
    if df < 1:
        raise ValueError("df must be >= 1")
    if ll_full < ll_null - LL_SLACK:
        raise ValueError(
            f"full-model log-likelihood {ll_full} is below the null {ll_null}; the fit is broken"
        )
    g = max(0.0, 2.0 * (ll_full - ll_null))
    return GTestResult(g=g, df=int(df), p=chi_square_sf(g, df), ll_full=ll_full, ll_null=ll_null)
