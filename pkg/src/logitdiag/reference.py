"""Published summary results for a 116-respondent binary-participation survey.

The raw survey rows were never released, so only cells that follow from the
summary numbers alone can be reproduced. :func:`consistency_report` reports
which printed cells agree with their own inputs.
"""

from __future__ import annotations

import math

N_RESPONDENTS = 116
N_PARTICIPANTS = 61

#: variable -> (std_dev, mean, printed CV %)
DESCRIPTIVES = {
    "Y": (0.50, 0.53, 95.37),
    "X1": (66.56, 91.96, 72.38),
    "X2": (0.89, 3.69, 24.09),
    "X3": (0.66, 1.35, 48.97),
    "X4": (2.28, 15.25, 14.97),
    "X5": (0.61, 2.38, 25.79),
    "X6": (2.50, 2.66, 94.25),
    "X7": (3.20, 5.17, 61.85),
    "X8": (3.15, 12.51, 25.16),
    "D1": (0.48, 0.65, 74.35),
}

#: variable -> (coefficient, SE, printed z, printed p, printed odds ratio or None)
COEFFICIENTS = {
    "Constant": (-33.9, 747.4, -0.05, 0.964, None),
    "X1": (0.012388, 0.008043, 1.54, 0.023, 1.01),
    "X2": (-2.526, 1.423, -1.78, 0.036, 1.08),
    "X3": (1.241, 1.273, 0.97, 0.830, 3.46),
    "X4": (0.6616, 0.6111, 1.08, 0.279, 1.94),
    "X5": (1.070, 2.922, 0.37, 0.714, 2.91),
    "X6": (29.8, 747.4, 0.04, 0.018, 8.77),
    "X7": (0.4254, 0.2858, 1.49, 0.137, 1.53),
    "X8": (-0.7503, 0.4957, -1.51, 0.130, 0.47),
    "D1": (-1.117, 1.417, -0.79, 0.431, 0.33),
}

LOG_LIKELIHOOD = -10.763
G_STATISTIC = 138.973
G_DF = 9

#: method -> (statistic, df, p)
GOODNESS_OF_FIT = {
    "Pearson": (44.852, 106, 0.886),
    "Deviance": (21.526, 106, 0.865),
    "Hosmer-Lemeshow": (0.246, 8, 0.763),
}

PAIRS = {"concordant": 3319, "discordant": 251, "ties": 11, "total": 3581}
SUMMARY_MEASURES = {"somers_d": 0.98, "gamma": 0.99, "tau_a": 0.50}

#: Frequency profile (percent) of the binary response.
RESPONSE_PERCENT = {"0": 47.41, "1": 52.59}


def odds_ratio_mismatches(tol: float = 0.005) -> dict[str, tuple[float, float]]:
    """Rows whose printed odds ratio differs from ``exp(coefficient)`` by more than ``tol``."""
    out = {}
    for name, (coef, _, _, _, printed) in COEFFICIENTS.items():
        if printed is None:
            continue
        actual = math.exp(coef)
        if abs(actual - printed) > tol:
            out[name] = (printed, actual)
    return out


def consistency_report() -> list[str]:
    """One line per printed cell that disagrees with the numbers it is derived from."""
    from .special import chi_square_sf, normal_sf

    lines = []
    for name, (printed, actual) in odds_ratio_mismatches().items():
        lines.append(f"odds ratio {name}: printed {printed}, exp(coefficient) = {actual:.4g}")
    for name, (coef, se, z, p, _) in COEFFICIENTS.items():
        p_two = 2 * normal_sf(abs(coef / se))
        if abs(p_two - p) > 0.0015:
            lines.append(f"p-value {name}: printed {p}, two-sided from z={coef / se:.3f} is {p_two:.3f}")
    for name, (stat, df, p) in GOODNESS_OF_FIT.items():
        p_calc = chi_square_sf(stat, df)
        if abs(p_calc - p) > 0.0015:
            lines.append(f"{name} p-value: printed {p}, chi2({df}) tail at {stat} is {p_calc:.3f}")
    total = N_PARTICIPANTS * (N_RESPONDENTS - N_PARTICIPANTS)
    if PAIRS["total"] != total:
        lines.append(f"pair total: printed {PAIRS['total']}, 61 x 55 = {total}")
    c, d, t = PAIRS["concordant"], PAIRS["discordant"], PAIRS["ties"]
    std = {
        "somers_d": (c - d) / (c + d + t),
        "gamma": (c - d) / (c + d),
        "tau_a": (c - d) / (N_RESPONDENTS * (N_RESPONDENTS - 1) / 2),
    }
    for key, printed in SUMMARY_MEASURES.items():
        if abs(std[key] - printed) > 0.005:
            lines.append(f"{key}: printed {printed}, from printed pair counts {std[key]:.3f}")
    return lines
