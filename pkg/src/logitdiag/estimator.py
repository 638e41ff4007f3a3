"""Maximum-likelihood logit fitting by Newton/IRLS with step-halving.

Two entry points share one solver:

* :func:`fit` works on a :class:`~logitdiag.data.Dataset` and returns a
  :class:`FitResult`;
* :class:`LogitRegression` is a scikit-learn classifier over plain arrays.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.multiclass import type_of_target
from sklearn.utils.validation import check_is_fitted, validate_data

from .core import (
    CoefficientVector,
    add_intercept,
    fitted_probabilities,
    information_matrix,
    inverse_logit,
    linear_predictor,
    log_likelihood,
    logit,
    score,
)
from .data import Dataset
from .linalg import NotPositiveDefiniteError, cho_solve, cholesky, inv_spd

#: Standardised coefficient magnitude beyond which a fit is treated as separated.
SEPARATION_COEF_LIMIT = 15.0
#: Fitted probabilities closer than this to 0 or 1 count as saturated.
SATURATION_EPS = 1e-8


class FitError(RuntimeError):
    """The likelihood cannot be maximised for this design."""


class AliasedPredictorError(FitError):
    def __init__(self, name: str):
        super().__init__(f"predictor {name!r} is constant and aliased with the intercept")
        self.name = name


class SingularInformationError(FitError):
    def __init__(self, iteration: int, detail: str = ""):
        msg = f"information matrix X'WX is singular at iteration {iteration}"
        super().__init__(msg + (f" ({detail})" if detail else ""))
        self.iteration = iteration


@dataclass(frozen=True)
class FitConfig:
    """Iteration controls.

    ``step_halving=False`` switches off the line search; it exists so the
    validation battery can inject a known fault, not for normal use.
    """

    max_iterations: int = 50
    tolerance: float = 1e-8
    se_clip_warning: float = 50.0
    ridge: float = 0.0
    step_halving: bool = True
    max_halvings: int = 40

    def __post_init__(self):
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be >= 0")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be > 0")
        if self.ridge < 0:
            raise ValueError("ridge must be >= 0")


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    log_likelihood: float
    max_abs_score: float
    step_size: float
    halvings: int


@dataclass(frozen=True)
class FitResult:
    coefficients: CoefficientVector
    covariance: np.ndarray = field(repr=False)
    standard_errors: np.ndarray
    log_likelihood: float
    iterations: int
    converged: bool
    separation_detected: bool
    n_obs: int
    trace: tuple[IterationRecord, ...] = field(default=(), repr=False)
    messages: tuple[str, ...] = ()

    @property
    def names(self) -> tuple[str, ...]:
        return self.coefficients.names

    @property
    def n_params(self) -> int:
        return self.coefficients.values.size

    def predict(self, x) -> float | np.ndarray:
        return predict(self, x)


def standard_errors(fr_or_cov) -> np.ndarray:
    """Square roots of the covariance diagonal."""
    cov = fr_or_cov.covariance if isinstance(fr_or_cov, FitResult) else fr_or_cov
    d = np.diag(np.asarray(cov, dtype=float))
    if np.any(d < 0) or np.any(np.isnan(d)):
        raise FitError(f"covariance has negative diagonal entries: {d[d < 0]}")
    return np.sqrt(d)


def predict(fr: FitResult, x) -> float | np.ndarray:
    """Fitted probability for one covariate row (or a matrix of rows)."""
    return inverse_logit(linear_predictor(fr.coefficients.values, x))


def null_log_likelihood(y) -> float:
    """Maximised log-likelihood of the intercept-only model."""
    y = np.asarray(y, dtype=float)
    n1 = float(y.sum())
    n0 = y.size - n1
    out = 0.0
    if n1:
        out += n1 * math.log(n1 / y.size)
    if n0:
        out += n0 * math.log(n0 / y.size)
    return out


def detect_separation(trace, fr: FitResult, X, cfg: FitConfig = FitConfig()) -> tuple[bool, list[str]]:
    """Flag (quasi-)complete separation and say why.

    ``X`` is the design matrix including the intercept column.
    """
    X = np.asarray(X, dtype=float)
    beta = fr.coefficients.values
    if beta.size == 1:
        return False, []
    reasons = []
    slopes = X[:, 1:]
    sd = slopes.std(axis=0, ddof=1) if X.shape[0] > 1 else np.zeros(slopes.shape[1])
    std_coefs = beta[1:] * sd
    std_intercept = beta[0] + slopes.mean(axis=0) @ beta[1:]
    big = [n for n, c in zip(fr.names, std_coefs) if abs(c) > SEPARATION_COEF_LIMIT]
    if abs(std_intercept) > SEPARATION_COEF_LIMIT:
        big.insert(0, "intercept")
    if big:
        reasons.append(
            f"standardized coefficient above {SEPARATION_COEF_LIMIT:g} for {', '.join(big)}"
        )
    se = fr.standard_errors
    if np.any(se > cfg.se_clip_warning) or not np.all(np.isfinite(se)):
        names = ("intercept",) + fr.names
        bad = [n for n, s in zip(names, se) if not s <= cfg.se_clip_warning]
        reasons.append(f"standard error above {cfg.se_clip_warning:g} for {', '.join(bad)}")
    pi = inverse_logit(X @ beta, clip=False)
    saturated = np.mean((pi < SATURATION_EPS) | (pi > 1 - SATURATION_EPS))
    trace = list(trace)
    improving = len(trace) >= 2 and trace[-1].log_likelihood > trace[-2].log_likelihood
    if not fr.converged and saturated >= 0.99 and improving:
        reasons.append(f"{saturated:.0%} of fitted probabilities saturated while likelihood still rising")
    return bool(reasons), reasons


def _penalised(beta, X, y, ridge):
    ll = log_likelihood(beta, X, y)
    if ridge:
        ll -= 0.5 * ridge * float(beta[1:] @ beta[1:])
    return ll


def irls(X, y, names, cfg: FitConfig = FitConfig(), start=None) -> FitResult:
    """Newton/IRLS on a design matrix ``X`` that already has the intercept column."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n, k = X.shape
    names = tuple(names)
    if len(names) != k - 1:
        raise ValueError("one name per predictor column is required")
    if not np.all((y == 0) | (y == 1)):
        raise ValueError("response must be coded 0/1")
    ybar = y.mean()
    if ybar in (0.0, 1.0):
        raise FitError("response is constant; the logit model has no finite MLE")
    for j, name in enumerate(names, start=1):
        if np.all(X[:, j] == X[0, j]):
            raise AliasedPredictorError(name)
    if n <= k:
        warnings.warn(
            f"{n} observations for {k} parameters; estimates will be unstable",
            RuntimeWarning,
            stacklevel=3,
        )

    penalty = np.zeros((k, k))
    penalty[1:, 1:] = cfg.ridge * np.eye(k - 1)
    if start is None:
        beta = np.zeros(k)
        beta[0] = logit(ybar)
    else:
        beta = np.array(start, dtype=float).ravel()
        if beta.size != k:
            raise ValueError(f"start vector has {beta.size} entries, expected {k}")
    ll = _penalised(beta, X, y, cfg.ridge)
    grad = score(beta, X, y) - penalty @ beta
    trace = [IterationRecord(0, ll, float(np.max(np.abs(grad))), 0.0, 0)]
    messages = []
    converged = False
    prev_beta = None
    singular_at = None

    iteration = 0
    for iteration in range(1, cfg.max_iterations + 1):
        H = information_matrix(beta, X) + penalty
        try:
            L = cholesky(H)
        except NotPositiveDefiniteError as exc:
            if prev_beta is None:
                raise SingularInformationError(iteration, str(exc)) from None
            singular_at = iteration - 1
            break
        step = cho_solve(L, grad)
        t = 1.0
        halvings = 0
        candidate = beta + step
        ll_new = _penalised(candidate, X, y, cfg.ridge)
        if cfg.step_halving:
            while not ll_new >= ll and halvings < cfg.max_halvings:
                t *= 0.5
                halvings += 1
                candidate = beta + t * step
                ll_new = _penalised(candidate, X, y, cfg.ridge)
            if not ll_new >= ll:
                # no ascent along the Newton direction: numerically at the optimum
                converged = bool(np.max(np.abs(grad)) <= cfg.tolerance)
                iteration -= 1
                break
        elif not np.isfinite(ll_new):
            raise FitError(f"log-likelihood diverged at iteration {iteration}")
        prev_beta = beta
        taken = t * step
        beta = candidate
        d_ll = ll_new - ll
        ll = ll_new
        grad = score(beta, X, y) - penalty @ beta
        max_grad = float(np.max(np.abs(grad)))
        step_size = float(np.max(np.abs(taken)))
        trace.append(IterationRecord(iteration, ll, max_grad, step_size, halvings))
        if (
            max_grad <= cfg.tolerance
            and abs(d_ll) <= cfg.tolerance
            and step_size <= math.sqrt(cfg.tolerance) * (1.0 + float(np.max(np.abs(beta))))
        ):
            converged = True
            break

    try:
        cov = inv_spd(information_matrix(beta, X) + penalty)
    except NotPositiveDefiniteError:
        if prev_beta is None:
            raise SingularInformationError(iteration) from None
        singular_at = iteration if singular_at is None else singular_at
        beta = prev_beta
        ll = _penalised(beta, X, y, cfg.ridge)
        cov = inv_spd(information_matrix(beta, X) + penalty)
        trace = trace[:-1]
        iteration = trace[-1].iteration
    if singular_at is not None:
        converged = False
        messages.append(
            f"information matrix singular at iterate {singular_at}; "
            f"returning iterate {iteration}"
        )
    if not converged and singular_at is None and cfg.max_iterations:
        messages.append(f"no convergence within {cfg.max_iterations} iterations")

    fr = FitResult(
        coefficients=CoefficientVector(names, beta),
        covariance=cov,
        standard_errors=standard_errors(cov),
        log_likelihood=log_likelihood(beta, X, y),
        iterations=iteration,
        converged=converged,
        separation_detected=False,
        n_obs=n,
        trace=tuple(trace),
        messages=tuple(messages),
    )
    separated, reasons = detect_separation(trace, fr, X, cfg)
    if singular_at is not None and not separated:
        raise SingularInformationError(singular_at, "no separation signature")
    if separated:
        fr = replace(
            fr,
            separation_detected=True,
            messages=fr.messages + tuple(f"possible separation: {r}" for r in reasons),
        )
    return fr


def design(ds: Dataset) -> tuple[np.ndarray, np.ndarray, tuple[str, ...]]:
    return add_intercept(ds.X), ds.y, tuple(s.name for s in ds.predictors)


def fit(ds: Dataset, cfg: FitConfig = FitConfig(), start=None) -> FitResult:
    """Fit the logit model of the response on every predictor in ``ds``."""
    X, y, names = design(ds)
    if isinstance(start, CoefficientVector):
        start = start.aligned_to(names)
    return irls(X, y, names, cfg, start)


def fitted_values(fr: FitResult, ds: Dataset, clip: bool = True) -> np.ndarray:
    """Fitted probabilities for each row of ``ds``, matched to coefficients by name."""
    X, _, names = design(ds)
    return fitted_probabilities(fr.coefficients.aligned_to(names), X, clip=clip)


class LogitRegression(ClassifierMixin, BaseEstimator):
    """Unpenalised binary logit model fitted by Newton/IRLS.

    Parameters
    ----------
    max_iter : int, default=50
        Newton iterations before giving up.
    tol : float, default=1e-8
        Convergence threshold on the score and on the log-likelihood change.
    ridge : float, default=0.0
        Optional L2 penalty on the slopes (not the intercept).
    se_clip_warning : float, default=50.0
        Any standard error above this flags possible separation.
    step_halving : bool, default=True
        Line search on the Newton step.

    Attributes
    ----------
    coef_ : ndarray of shape (1, n_features)
    intercept_ : ndarray of shape (1,)
    bse_ : ndarray of shape (n_features + 1,)
        Standard errors, intercept first.
    covariance_ : ndarray of shape (n_features + 1, n_features + 1)
    llf_ : float
        Maximised log-likelihood.
    converged_, separation_ : bool
    n_iter_ : int
    result_ : FitResult
    """

    def __init__(self, max_iter=50, tol=1e-8, ridge=0.0, se_clip_warning=50.0, step_halving=True):
        self.max_iter = max_iter
        self.tol = tol
        self.ridge = ridge
        self.se_clip_warning = se_clip_warning
        self.step_halving = step_halving

    def _config(self) -> FitConfig:
        return FitConfig(
            max_iterations=self.max_iter,
            tolerance=self.tol,
            se_clip_warning=self.se_clip_warning,
            ridge=self.ridge,
            step_halving=self.step_halving,
        )

    def fit(self, X, y):
        X, y = validate_data(self, X, y, dtype=np.float64, y_numeric=True)
        if type_of_target(y) != "binary" or not np.all(np.isin(y, (0, 1))):
            raise ValueError("y must be a binary 0/1 vector containing both classes")
        names = tuple(getattr(self, "feature_names_in_", [f"x{j}" for j in range(X.shape[1])]))
        fr = irls(add_intercept(X), y, names, self._config())
        self.result_ = fr
        self.classes_ = np.array([0, 1])
        self.intercept_ = np.array([fr.coefficients.intercept])
        self.coef_ = fr.coefficients.slopes[None, :].copy()
        self.covariance_ = fr.covariance
        self.bse_ = fr.standard_errors
        self.llf_ = fr.log_likelihood
        self.converged_ = fr.converged
        self.separation_ = fr.separation_detected
        self.n_iter_ = fr.iterations
        return self

    def decision_function(self, X):
        check_is_fitted(self)
        X = validate_data(self, X, dtype=np.float64, reset=False)
        return self.intercept_[0] + X @ self.coef_[0]

    def predict_proba(self, X):
        p = inverse_logit(self.decision_function(X))
        return np.column_stack([1.0 - p, p])

    def predict(self, X):
        return (self.decision_function(X) > 0).astype(int)
