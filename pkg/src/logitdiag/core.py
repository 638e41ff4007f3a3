"""Logit link, Bernoulli log-likelihood and its derivatives.

Coefficient vectors are laid out intercept first, then one slope per
predictor column. Continuous and dummy slopes share the same vector; they
differ only in the role of the column they multiply.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

#: Probabilities are kept at least this far from 0 and 1.
EPS = 1e-12


@dataclass(frozen=True)
class CoefficientVector:
    """Named coefficients: ``values[0]`` is the intercept."""

    names: tuple[str, ...]
    values: np.ndarray

    INTERCEPT = "_intercept"

    def __post_init__(self):
        values = np.array(self.values, dtype=float, copy=True).ravel()
        names = tuple(self.names)
        if len(names) != values.size - 1:
            raise ValueError(
                f"{len(names)} slope names for {values.size - 1} slope values"
            )
        values.setflags(write=False)
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "values", values)

    def __eq__(self, other):
        if not isinstance(other, CoefficientVector):
            return NotImplemented
        return self.names == other.names and np.array_equal(self.values, other.values)

    __hash__ = None

    @property
    def intercept(self) -> float:
        return float(self.values[0])

    @property
    def slopes(self) -> np.ndarray:
        return self.values[1:]

    def as_dict(self) -> dict[str, float]:
        out = {self.INTERCEPT: self.intercept}
        out.update(zip(self.names, map(float, self.slopes)))
        return out

    def aligned_to(self, predictor_names) -> np.ndarray:
        """Values ordered for ``predictor_names``, checked by name."""
        predictor_names = list(predictor_names)
        if sorted(predictor_names) != sorted(self.names):
            raise ValueError(
                f"coefficients {list(self.names)} do not match predictors {predictor_names}"
            )
        lookup = dict(zip(self.names, self.slopes))
        return np.concatenate([[self.intercept], [lookup[k] for k in predictor_names]])


def add_intercept(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    return np.column_stack([np.ones(X.shape[0]), X])


def _check(beta, X, y=None):
    beta = np.asarray(beta, dtype=float).ravel()
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != beta.size:
        raise ValueError(
            f"design matrix has {X.shape[-1] if X.ndim else 0} columns, "
            f"coefficient vector has {beta.size}"
        )
    if y is not None:
        y = np.asarray(y, dtype=float).ravel()
        if y.size != X.shape[0]:
            raise ValueError(f"{y.size} responses for {X.shape[0]} rows")
    return beta, X, y


def linear_predictor(beta, x):
    """``intercept + slopes . x`` for one row ``x`` or a predictor matrix.

    ``x`` excludes the intercept column.
    """
    beta = np.asarray(beta, dtype=float).ravel()
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != beta.size - 1:
        raise ValueError(f"covariate length {x.shape[-1]} != {beta.size - 1} slopes")
    z = beta[0] + x @ beta[1:]
    return float(z) if np.ndim(z) == 0 else z


def inverse_logit(z, clip: bool = True):
    """Logistic function ``e^z / (1 + e^z)`` without overflow.

    With ``clip`` the result is held inside ``[EPS, 1 - EPS]``.
    """
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    if clip:
        np.clip(out, EPS, 1.0 - EPS, out=out)
    return float(out) if out.ndim == 0 else out


def logit(p):
    """Log-odds ``ln(p / (1 - p))`` for ``0 < p < 1``."""
    p = np.asarray(p, dtype=float)
    if np.any((p <= 0) | (p >= 1)) or np.any(np.isnan(p)):
        raise ValueError("logit needs probabilities strictly between 0 and 1")
    out = np.log(p) - np.log1p(-p)
    return float(out) if out.ndim == 0 else out


def log_likelihood(beta, X, y) -> float:
    """Bernoulli log-likelihood ``sum(y z - ln(1 + e^z))``.

    ``X`` includes the intercept column.
    """
    beta, X, y = _check(beta, X, y)
    z = X @ beta
    return float(np.sum(y * z - np.logaddexp(0.0, z)))


def fitted_probabilities(beta, X, clip: bool = True) -> np.ndarray:
    beta, X, _ = _check(beta, X)
    return inverse_logit(X @ beta, clip=clip)


def score(beta, X, y) -> np.ndarray:
    """Gradient of :func:`log_likelihood`, ``X^T (y - pi)``."""
    beta, X, y = _check(beta, X, y)
    pi = inverse_logit(X @ beta, clip=False)
    return X.T @ (y - pi)


def information_matrix(beta, X) -> np.ndarray:
    """Observed (= expected) information ``X^T W X``, ``W = diag(pi (1 - pi))``."""
    beta, X, _ = _check(beta, X)
    pi = inverse_logit(X @ beta, clip=False)
    w = pi * (1.0 - pi)
    info = X.T @ (w[:, None] * X)
    return 0.5 * (info + info.T)
