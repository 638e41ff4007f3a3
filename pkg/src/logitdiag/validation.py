"""Built-in oracle and Monte Carlo validation battery."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .core import CoefficientVector, add_intercept, information_matrix, log_likelihood, score
from .data import Dataset, Role, VariableSpec
from .diagnostics import count_pairs_brute, count_pairs_fast
from .estimator import FitConfig, FitError, fit
from .simulate import (
    CovariateGenerator,
    SynthSpec,
    brute_force_mle,
    coverage_experiment,
    ks_uniform,
    stream,
)
from .special import chi_square_cdf, normal_cdf


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    values: dict = field(default_factory=dict)
    seconds: float = 0.0

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail,
                "values": self.values, "seconds": self.seconds}


def _dataset(X, y) -> Dataset:
    k = X.shape[1]
    specs = (VariableSpec("y", Role.RESPONSE),) + tuple(
        VariableSpec(f"x{j + 1}", Role.CONTINUOUS) for j in range(k)
    )
    return Dataset(specs, np.column_stack([y, X]))


def random_instance(seed: int, index: int, max_n: int = 30, max_predictors: int = 3):
    """One small random logit dataset (not screened for separation)."""
    rng = stream(seed, index, 0)
    n = int(rng.integers(12, max_n + 1))
    k = int(rng.integers(1, max_predictors + 1))
    scale = rng.uniform(0.5, 3.0, k)
    X = rng.normal(0.0, 1.0, (n, k)) * scale + rng.normal(0.0, 1.0, k)
    beta = np.concatenate([[rng.normal(0.0, 0.5)], rng.normal(0.0, 1.0, k) / scale])
    pi = 1.0 / (1.0 + np.exp(-(add_intercept(X) @ beta)))
    y = (rng.random(n) < pi).astype(float)
    return _dataset(X, y)


#: Nearly separated data on which undamped Newton from the null start diverges
#: (log-likelihood -3.13 -> -36.9 -> -564) although the MLE is finite.
LINE_SEARCH_CASE = (
    [-1.54, -1.38, 0.03, 0.03, 0.29, 0.33, 0.5, 0.65, 0.67, 0.68, 0.7, 0.76, 1.21],
    [1, 0, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1],
)


def line_search_case() -> Dataset:
    x, y = LINE_SEARCH_CASE
    return _dataset(np.array(x)[:, None], np.array(y, dtype=float))


def oracle_instances(seed: int, count: int = 50):
    """``count`` small datasets whose reference fit is neither separated nor failing."""
    out = []
    index = 0
    while len(out) < count:
        ds = random_instance(seed, index)
        index += 1
        if ds.y.min() == ds.y.max():
            continue
        try:
            fr = fit(ds)
        except FitError:
            continue
        if fr.converged and not fr.separation_detected:
            out.append(ds)
    return out


def check_oracle_agreement(seed: int = 0, count: int = 50, cfg: FitConfig = FitConfig(),
                           coef_tol: float = 1e-4, ll_tol: float = 1e-6) -> CheckResult:
    t0 = time.perf_counter()
    worst_coef = worst_ll = 0.0
    failures = 0
    instances = oracle_instances(seed, count) + [line_search_case()]
    for k, ds in enumerate(instances):
        oracle = brute_force_mle(ds, seed=k)
        try:
            fr = fit(ds, cfg)
        except (FitError, ArithmeticError, ValueError):
            failures += 1
            continue
        if not fr.converged:
            failures += 1
        names = tuple(s.name for s in ds.predictors)
        diff = np.max(np.abs(fr.coefficients.aligned_to(names) - oracle.coefficients.aligned_to(names)))
        worst_coef = max(worst_coef, float(diff) if np.isfinite(diff) else math.inf)
        worst_ll = max(worst_ll, abs(fr.log_likelihood - oracle.log_likelihood))
    passed = failures == 0 and worst_coef <= coef_tol and worst_ll <= ll_tol
    return CheckResult(
        "oracle agreement",
        passed,
        f"{len(instances)} instances; max |coef diff| {worst_coef:.2e} (tol {coef_tol:g}), "
        f"max |ll diff| {worst_ll:.2e} (tol {ll_tol:g}), failed fits {failures}",
        {"max_coef_diff": worst_coef, "max_ll_diff": worst_ll, "failed_fits": failures},
        time.perf_counter() - t0,
    )


def finite_difference_errors(beta, X, y, h: float = 1e-5) -> tuple[float, float]:
    """Relative errors of the analytic score and information against central differences."""
    k = beta.size
    g_fd = np.empty(k)
    H_fd = np.empty((k, k))
    for j in range(k):
        e = np.zeros(k)
        e[j] = h
        g_fd[j] = (log_likelihood(beta + e, X, y) - log_likelihood(beta - e, X, y)) / (2 * h)
        H_fd[:, j] = -(score(beta + e, X, y) - score(beta - e, X, y)) / (2 * h)
    g = score(beta, X, y)
    H = information_matrix(beta, X)
    g_err = np.max(np.abs(g - g_fd)) / max(1.0, np.max(np.abs(g)))
    H_err = np.max(np.abs(H - H_fd)) / max(1.0, np.max(np.abs(H)))
    return float(g_err), float(H_err)


def check_derivatives(seed: int = 0, points: int = 100) -> CheckResult:
    t0 = time.perf_counter()
    worst_g = worst_H = 0.0
    for i in range(points):
        rng = stream(seed, i, 1)
        n = int(rng.integers(5, 51))
        k = int(rng.integers(1, 5))
        X = add_intercept(rng.normal(0.0, 1.0, (n, k)))
        y = (rng.random(n) < 0.5).astype(float)
        beta = rng.normal(0.0, 1.0, k + 1)
        g_err, H_err = finite_difference_errors(beta, X, y)
        worst_g, worst_H = max(worst_g, g_err), max(worst_H, H_err)
    passed = worst_g <= 1e-5 and worst_H <= 1e-4
    return CheckResult(
        "score/information vs finite differences", passed,
        f"{points} points; max rel error score {worst_g:.1e} (tol 1e-5), information {worst_H:.1e} (tol 1e-4)",
        {"score_error": worst_g, "information_error": worst_H}, time.perf_counter() - t0,
    )


def check_pair_counting(seed: int = 0, instances: int = 200, max_n: int = 1000) -> CheckResult:
    t0 = time.perf_counter()
    mismatches = 0
    for i in range(instances):
        rng = stream(seed, i, 2)
        n1 = int(rng.integers(1, max_n // 2 + 1))
        n0 = int(rng.integers(1, max_n // 2 + 1))
        # coarse rounding forces plenty of exact ties
        digits = int(rng.integers(1, 4))
        ones = np.sort(np.round(rng.random(n1), digits))
        zeros = np.sort(np.round(rng.random(n0), digits))
        if count_pairs_fast(ones, zeros) != count_pairs_brute(ones, zeros):
            mismatches += 1
    return CheckResult(
        "pair counting vs brute force", mismatches == 0,
        f"{instances} instances up to n={max_n}; mismatches {mismatches}",
        {"mismatches": mismatches}, time.perf_counter() - t0,
    )


def check_special_functions() -> CheckResult:
    phi = normal_cdf(1.959964)
    chi = chi_square_cdf(3.841, 1)
    grid = np.linspace(0.0, 50.0, 501)
    closed = max(abs(chi_square_cdf(x, 2) - (-math.expm1(-x / 2))) for x in grid)
    passed = abs(phi - 0.975) <= 1e-6 and abs(chi - 0.95) <= 1e-4 and closed <= 1e-10
    return CheckResult(
        "special functions", passed,
        f"Phi(1.959964)={phi:.9f}; chi2cdf(3.841,1)={chi:.6f}; df=2 closed-form error {closed:.1e}",
        {"phi": phi, "chi2": chi, "df2_error": closed},
    )


def two_normal_spec(n: int = 500, beta=(0.5, -0.5), intercept: float = 0.0, seed: int = 0) -> SynthSpec:
    gens = tuple(CovariateGenerator(f"x{j + 1}", "normal", {"mean": 0.0, "sd": 1.0})
                 for j in range(len(beta)))
    coefs = CoefficientVector(tuple(g.name for g in gens), [intercept, *beta])
    return SynthSpec(n, gens, coefs, seed)


def check_coverage(seed: int = 0, replicates: int = 1000, n_jobs: int = 1) -> CheckResult:
    t0 = time.perf_counter()
    rep = coverage_experiment(two_normal_spec(500, seed=seed), replicates, 0.05, n_jobs=n_jobs)
    cov = rep.coverage_95
    passed = rep.usable and all(0.93 <= c <= 0.97 for c in cov.values())
    return CheckResult(
        "Wald 95% CI coverage", passed,
        f"{replicates} replicates, n=500, beta=(0.5,-0.5): "
        + ", ".join(f"{k} {v:.3f}" for k, v in cov.items()) + " (band [0.93, 0.97])",
        {"coverage": cov, "separation_rate": rep.separation_rate}, time.perf_counter() - t0,
    )


def check_null_calibration(seed: int = 0, replicates: int = 1000, n_jobs: int = 1) -> CheckResult:
    t0 = time.perf_counter()
    g_rep = coverage_experiment(two_normal_spec(200, beta=(0.0, 0.0), seed=seed + 1),
                                replicates, n_jobs=n_jobs)
    hl_rep = coverage_experiment(two_normal_spec(300, beta=(0.5, -0.5), seed=seed + 2),
                                 replicates, n_jobs=n_jobs)
    ks_g = ks_uniform(g_rep.g_pvalues)
    ks_hl = ks_uniform(hl_rep.hl_pvalues)
    passed = ks_g <= 0.06 and ks_hl <= 0.06
    return CheckResult(
        "p-value uniformity under a true model", passed,
        f"KS distance: G test {ks_g:.4f}, Hosmer-Lemeshow {ks_hl:.4f} (limit 0.06)",
        {"ks_g": ks_g, "ks_hl": ks_hl}, time.perf_counter() - t0,
    )


def check_separation_rate(seed: int = 0, replicates: int = 200, n_jobs: int = 1) -> CheckResult:
    t0 = time.perf_counter()
    from .simulate import run_replicates

    outcomes = run_replicates(two_normal_spec(500, seed=seed + 3), replicates, n_jobs=n_jobs)
    rate = sum(o.separated for o in outcomes) / replicates
    toy = _dataset(np.array([[0.0], [1.0]] * 5), np.array([0.0, 1.0] * 5))
    toy_flag = fit(toy).separation_detected
    passed = toy_flag and rate < 0.01
    return CheckResult(
        "separation detection", passed,
        f"separable toy flagged: {toy_flag}; false-flag rate {rate:.3f} over {replicates} "
        "well-conditioned replicates (limit < 0.01)",
        {"toy_flagged": toy_flag, "false_rate": rate}, time.perf_counter() - t0,
    )


def run_battery(seed: int = 0, replicates: int = 1000, cfg: FitConfig = FitConfig(),
                n_jobs: int = 1, monte_carlo: bool = True) -> list[CheckResult]:
    checks = [
        check_oracle_agreement(seed, cfg=cfg),
        check_derivatives(seed),
        check_pair_counting(seed),
        check_special_functions(),
    ]
    if monte_carlo:
        checks += [
            check_coverage(seed, replicates, n_jobs),
            check_null_calibration(seed, replicates, n_jobs),
            check_separation_rate(seed, min(replicates, 200), n_jobs),
        ]
    return checks
