"""Goodness-of-fit tests and rank association between outcomes and fitted risk."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import EPS
from .data import Dataset
from .estimator import FitResult, fitted_values
from .special import chi_square_sf


class GofMethod(str, Enum):
    PEARSON = "Pearson"
    DEVIANCE = "Deviance"
    HOSMER_LEMESHOW = "Hosmer-Lemeshow"


class DegenerateBinError(ValueError):
    def __init__(self, bin_index: int, detail: str):
        super().__init__(f"Hosmer-Lemeshow bin {bin_index + 1} is degenerate: {detail}")
        self.bin_index = bin_index


@dataclass(frozen=True)
class GofResult:
    method: GofMethod
    statistic: float
    df: int
    p: float
    warning: str | None = None

    def to_dict(self) -> dict:
        out = {"method": self.method.value, "statistic": self.statistic,
               "df": self.df, "p": self.p}
        if self.warning:
            out["warning"] = self.warning
        return out


@dataclass(frozen=True)
class AssociationResult:
    concordant: int
    discordant: int
    ties: int
    total_pairs: int
    somers_d: float
    gamma: float
    tau_a: float

    @property
    def auc(self) -> float:
        return (self.somers_d + 1.0) / 2.0

    def to_dict(self) -> dict:
        return {
            "concordant": self.concordant, "discordant": self.discordant,
            "ties": self.ties, "total_pairs": self.total_pairs,
            "somers_d": self.somers_d, "gamma": self.gamma, "tau_a": self.tau_a,
            "auc": self.auc,
        }


def _residual_df(fr: FitResult, n: int) -> int:
    return n - fr.n_params


def _boundary_warning(pi: np.ndarray) -> str | None:
    k = int(np.sum((pi <= EPS) | (pi >= 1 - EPS)))
    if k:
        return f"{k} fitted probabilities at the clamp boundary; statistic unreliable under separation"
    return None


def pearson_from(y, pi, n_params: int) -> GofResult:
    y = np.asarray(y, dtype=float)
    pi = np.clip(np.asarray(pi, dtype=float), EPS, 1 - EPS)
    stat = float(np.sum((y - pi) ** 2 / (pi * (1.0 - pi))))
    df = y.size - n_params
    return GofResult(GofMethod.PEARSON, stat, df,
                     chi_square_sf(stat, df) if df >= 1 else float("nan"),
                     _boundary_warning(pi))


def pearson_gof(fr: FitResult, ds: Dataset) -> GofResult:
    """Pearson chi-square over individual observations, ``df = n - p``."""
    return pearson_from(ds.y, fitted_values(fr, ds), fr.n_params)


def deviance_gof(fr: FitResult, ds: Dataset) -> GofResult:
    """Deviance ``-2 ll``; the saturated model of ungrouped 0/1 data has ``ll = 0``."""
    stat = -2.0 * fr.log_likelihood
    df = _residual_df(fr, ds.n)
    return GofResult(GofMethod.DEVIANCE, stat, df,
                     chi_square_sf(max(stat, 0.0), df) if df >= 1 else float("nan"),
                     _boundary_warning(fitted_values(fr, ds)))


def hl_bins(pi, groups: int) -> list[np.ndarray]:
    """Index arrays of the equal-count risk groups (ascending fitted probability).

    The first ``n % groups`` groups hold one extra observation; ties keep
    their original order.
    """
    order = np.argsort(np.asarray(pi), kind="stable")
    return np.array_split(order, groups)


def hosmer_lemeshow_from(y, pi, groups: int = 10) -> GofResult:
    y = np.asarray(y, dtype=float)
    pi = np.asarray(pi, dtype=float)
    n = y.size
    if groups < 3:
        raise ValueError("Hosmer-Lemeshow needs at least 3 groups")
    if n < groups:
        raise ValueError(f"{n} observations cannot fill {groups} groups")
    if n < 2 * groups:
        # bins from index n % groups onward would hold a single observation
        raise DegenerateBinError(
            n % groups,
            f"{groups} groups over {n} observations leaves single-observation bins",
        )
    stat = 0.0
    for g, idx in enumerate(hl_bins(pi, groups)):
        o = y[idx].sum()
        e = pi[idx].sum()
        var = e * (1.0 - e / idx.size)
        if not var > 0:
            raise DegenerateBinError(g, f"expected count {e:.6g} of {idx.size} gives zero variance")
        stat += (o - e) ** 2 / var
    df = groups - 2
    return GofResult(GofMethod.HOSMER_LEMESHOW, float(stat), df, chi_square_sf(stat, df),
                     _boundary_warning(pi))


def hosmer_lemeshow(fr: FitResult, ds: Dataset, groups: int = 10) -> GofResult:
    """Hosmer-Lemeshow test over ``groups`` equal-count deciles of risk, ``df = groups - 2``."""
    return hosmer_lemeshow_from(ds.y, fitted_values(fr, ds), groups)


def count_pairs_fast(pi_ones, pi_zeros) -> tuple[int, int, int]:
    """Concordant, discordant and tied (one, zero) pairs from two sorted arrays.

    Runs in ``O((n1 + n0) log n0)``.
    """
    ones = np.asarray(pi_ones, dtype=float)
    zeros = np.asarray(pi_zeros, dtype=float)
    if np.any(np.diff(ones) < 0) or np.any(np.diff(zeros) < 0):
        raise ValueError("count_pairs_fast needs inputs sorted ascending")
    below = np.searchsorted(zeros, ones, side="left")
    at_or_below = np.searchsorted(zeros, ones, side="right")
    concordant = int(below.sum())
    ties = int((at_or_below - below).sum())
    discordant = ones.size * zeros.size - concordant - ties
    return concordant, discordant, ties


def count_pairs_brute(pi_ones, pi_zeros) -> tuple[int, int, int]:
    """Reference ``O(n1 n0)`` pair count."""
    c = d = t = 0
    for a in pi_ones:
        for b in pi_zeros:
            if a > b:
                c += 1
            elif a < b:
                d += 1
            else:
                t += 1
    return c, d, t


def association_from(y, pi) -> AssociationResult:
    y = np.asarray(y)
    pi = np.asarray(pi, dtype=float)
    ones = np.sort(pi[y == 1])
    zeros = np.sort(pi[y == 0])
    if ones.size == 0 or zeros.size == 0:
        raise ValueError("association measures need both outcomes present")
    c, d, t = count_pairs_fast(ones, zeros)
    total = ones.size * zeros.size
    n = y.size
    return AssociationResult(
        concordant=c, discordant=d, ties=t, total_pairs=total,
        somers_d=(c - d) / total,
        gamma=(c - d) / (c + d) if c + d else 0.0,
        tau_a=(c - d) / (n * (n - 1) / 2),
    )


def association(fr: FitResult, ds: Dataset) -> AssociationResult:
    """Concordance of fitted probabilities with the observed response."""
    return association_from(ds.y, fitted_values(fr, ds, clip=False))
