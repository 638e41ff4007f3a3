"""Synthetic survey data, a derivative-free MLE oracle and Monte Carlo checks.

Random streams
--------------
Every column of replicate ``r`` draws from its own Philox-4x64 generator
seeded by ``SeedSequence(seed, spawn_key=(r, column_index))``; the response
column uses ``column_index = len(generators)``. Streams are fixed before any
sampling, so adding replicates or columns never perturbs existing ones, and a
replicate's data do not depend on which worker produced it.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from importlib import resources

import numpy as np
from scipy.optimize import minimize

from .core import CoefficientVector, add_intercept, inverse_logit, log_likelihood
from .data import Dataset, Role, VariableSpec
from .diagnostics import DegenerateBinError, hosmer_lemeshow_from
from .estimator import FitConfig, FitError, fit, fitted_values, null_log_likelihood
from .inference import g_test
from .special import normal_ppf

KINDS = ("normal", "uniform", "bernoulli", "categorical_ordinal")


class SpecError(ValueError):
    """Malformed synthetic-data specification."""


@dataclass(frozen=True)
class CovariateGenerator:
    name: str
    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        p = self.params
        need = {
            "normal": ("mean", "sd"),
            "uniform": ("lo", "hi"),
            "bernoulli": ("p",),
            "categorical_ordinal": ("levels", "probs"),
        }
        if self.kind not in need:
            raise SpecError(f"{self.name}: unknown generator kind {self.kind!r}; use one of {KINDS}")
        missing = [k for k in need[self.kind] if k not in p]
        if missing:
            raise SpecError(f"{self.name}: {self.kind} generator needs {', '.join(missing)}")
        if self.kind == "normal" and not p["sd"] > 0:
            raise SpecError(f"{self.name}: sd must be > 0")
        if self.kind == "uniform" and not p["lo"] < p["hi"]:
            raise SpecError(f"{self.name}: need lo < hi")
        if self.kind == "bernoulli" and not 0 <= p["p"] <= 1:
            raise SpecError(f"{self.name}: p must lie in [0, 1]")
        if self.kind == "categorical_ordinal":
            levels, probs = p["levels"], p["probs"]
            if len(levels) != len(probs) or not levels:
                raise SpecError(f"{self.name}: levels and probs must be equal-length and non-empty")
            if any(q < 0 for q in probs) or abs(sum(probs) - 1.0) > 1e-9:
                raise SpecError(f"{self.name}: probs must be non-negative and sum to 1")

    @property
    def role(self) -> Role:
        return Role.DUMMY if self.kind == "bernoulli" else Role.CONTINUOUS

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        p = self.params
        if self.kind == "normal":
            return rng.normal(p["mean"], p["sd"], n)
        if self.kind == "uniform":
            return rng.uniform(p["lo"], p["hi"], n)
        if self.kind == "bernoulli":
            return (rng.random(n) < p["p"]).astype(float)
        cdf = np.cumsum(p["probs"])
        cdf[-1] = 1.0
        idx = np.searchsorted(cdf, rng.random(n), side="right")
        return np.asarray(p["levels"], dtype=float)[idx]

    def moments(self) -> tuple[float, float]:
        """Population mean and standard deviation."""
        p = self.params
        if self.kind == "normal":
            return p["mean"], p["sd"]
        if self.kind == "uniform":
            return (p["lo"] + p["hi"]) / 2, (p["hi"] - p["lo"]) / math.sqrt(12)
        if self.kind == "bernoulli":
            return p["p"], math.sqrt(p["p"] * (1 - p["p"]))
        lv = np.asarray(p["levels"], dtype=float)
        pr = np.asarray(p["probs"], dtype=float)
        m = float(lv @ pr)
        return m, math.sqrt(float(((lv - m) ** 2) @ pr))


@dataclass(frozen=True)
class SynthSpec:
    n: int
    generators: tuple[CovariateGenerator, ...]
    true_coefficients: CoefficientVector
    seed: int = 0
    response: str = "Y"
    descriptions: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        if int(self.n) != self.n or self.n < 1:
            raise SpecError(f"n must be a positive integer, got {self.n!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise SpecError("seed must be a 64-bit unsigned integer")
        names = [g.name for g in self.generators]
        if len(set(names)) != len(names) or self.response in names:
            raise SpecError("generator names must be unique and differ from the response")
        if sorted(names) != sorted(self.true_coefficients.names):
            raise SpecError(
                f"coefficients {sorted(self.true_coefficients.names)} do not align with "
                f"generators {sorted(names)}"
            )

    @property
    def names(self) -> list[str]:
        return [g.name for g in self.generators]

    def beta(self) -> np.ndarray:
        return self.true_coefficients.aligned_to(self.names)

    def schema(self) -> list[VariableSpec]:
        specs = [VariableSpec(self.response, Role.RESPONSE, self.descriptions.get(self.response, ""))]
        specs += [VariableSpec(g.name, g.role, self.descriptions.get(g.name, "")) for g in self.generators]
        return specs

    def with_(self, **changes) -> "SynthSpec":
        return replace(self, **changes)


def parse_synth_spec(obj: dict) -> SynthSpec:
    """Build a :class:`SynthSpec` from decoded JSON.

    Keys: ``n``, ``seed``, ``coefficients`` (name to value, ``_intercept``
    reserved), ``generators`` (name to ``{"kind", "params"}``), optional
    ``response`` and ``descriptions``.
    """
    if not isinstance(obj, dict):
        raise SpecError("spec must be a JSON object")
    for key in ("n", "seed", "coefficients", "generators"):
        if key not in obj:
            raise SpecError(f"spec is missing {key!r}")
    gens = obj["generators"]
    coefs = dict(obj["coefficients"])
    if not isinstance(gens, dict) or not gens:
        raise SpecError("'generators' must be a non-empty object")
    if CoefficientVector.INTERCEPT not in coefs:
        raise SpecError(f"coefficients need an {CoefficientVector.INTERCEPT!r} entry")
    intercept = float(coefs.pop(CoefficientVector.INTERCEPT))
    generators = []
    for name, g in gens.items():
        if not isinstance(g, dict) or "kind" not in g:
            raise SpecError(f"generator {name!r} needs a 'kind'")
        generators.append(CovariateGenerator(name, g["kind"], dict(g.get("params", {}))))
    try:
        n = obj["n"]
        seed = obj["seed"]
        if isinstance(n, bool) or not isinstance(n, int):
            raise SpecError(f"n must be an integer, got {n!r}")
        if isinstance(seed, bool) or not isinstance(seed, int):
            raise SpecError(f"seed must be an integer, got {seed!r}")
        coef_vec = CoefficientVector(tuple(coefs), [intercept, *map(float, coefs.values())])
    except (TypeError, ValueError) as exc:
        raise SpecError(str(exc)) from None
    return SynthSpec(n, tuple(generators), coef_vec, seed,
                     obj.get("response", "Y"), dict(obj.get("descriptions", {})))


def load_synth_spec(path) -> SynthSpec:
    with open(path, encoding="utf-8") as fh:
        try:
            return parse_synth_spec(json.load(fh))
        except json.JSONDecodeError as exc:
            raise SpecError(f"spec is not valid JSON: {exc}") from None


def spec_to_json(spec: SynthSpec) -> dict:
    return {
        "n": spec.n,
        "seed": spec.seed,
        "response": spec.response,
        "coefficients": spec.true_coefficients.as_dict(),
        "generators": {g.name: {"kind": g.kind, "params": g.params} for g in spec.generators},
        "descriptions": spec.descriptions,
    }


def survey_spec(seed: int = 2020) -> SynthSpec:
    """Bundled 116-respondent specification with survey-shaped covariates."""
    text = resources.files("logitdiag").joinpath("data/survey_spec.json").read_text("utf-8")
    return parse_synth_spec(json.loads(text)).with_(seed=seed)


def stream(seed: int, replicate: int, column: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(replicate), int(column)))
    return np.random.Generator(np.random.Philox(ss))


def generate(spec: SynthSpec, replicate: int = 0) -> Dataset:
    """Draw covariates per generator, then ``Y ~ Bernoulli(inverse_logit(z))``."""
    cols = [g.draw(stream(spec.seed, replicate, j), spec.n) for j, g in enumerate(spec.generators)]
    X = np.column_stack(cols) if cols else np.empty((spec.n, 0))
    pi = inverse_logit(add_intercept(X) @ spec.beta(), clip=False)
    u = stream(spec.seed, replicate, len(spec.generators)).random(spec.n)
    y = (u < pi).astype(float)
    return Dataset(tuple(spec.schema()), np.column_stack([y, X]))


# -- oracle -----------------------------------------------------------------


@dataclass(frozen=True)
class BruteForceResult:
    coefficients: CoefficientVector
    log_likelihood: float
    evaluations: int
    budget_exhausted: bool


def brute_force_mle(ds: Dataset, budget: int = 200_000, restarts: int = 10, seed: int = 0) -> BruteForceResult:
    """Maximise the log-likelihood with restarted Nelder-Mead simplexes.

    Uses no derivatives, so it is independent of the Newton solver it
    checks. Meant for at most 4 parameters and 50 rows.
    """
    X = add_intercept(ds.X)
    y = ds.y
    names = tuple(s.name for s in ds.predictors)
    k = X.shape[1]
    if k > 4 or ds.n > 50:
        raise ValueError("brute_force_mle is an oracle for <= 4 parameters and <= 50 rows")
    rng = np.random.default_rng(seed)
    evals = 0
    per_run = max(1, budget // (restarts + 2))

    def nll(b):
        return -log_likelihood(b, X, y)

    def run(x0):
        nonlocal evals
        res = minimize(nll, x0, method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-13, "maxfev": per_run,
                                "adaptive": k > 2})
        evals += res.nfev
        return res

    best = None
    starts = [np.zeros(k)] + [rng.normal(0.0, 2.0, k) for _ in range(restarts)]
    for x0 in starts:
        res = run(x0)
        if best is None or res.fun < best.fun:
            best = res
    # polish: restart the simplex at the incumbent until it stops moving
    for _ in range(20):
        if evals >= budget:
            break
        res = run(best.x)
        moved = np.max(np.abs(res.x - best.x))
        if res.fun <= best.fun:
            best = res
        if moved < 1e-10:
            break
    return BruteForceResult(CoefficientVector(names, best.x), -float(best.fun), evals, evals >= budget)


# -- Monte Carlo ------------------------------------------------------------


@dataclass(frozen=True)
class ReplicateOutcome:
    replicate: int
    estimate: np.ndarray | None
    se: np.ndarray | None
    separated: bool
    failed: bool
    g_p: float
    hl_p: float


@dataclass(frozen=True)
class MonteCarloReport:
    replicates: int
    names: tuple[str, ...]
    coverage_95: dict[str, float]
    mean_bias: dict[str, float]
    separation_rate: float
    used: int
    alpha: float
    g_pvalues: np.ndarray = field(repr=False)
    hl_pvalues: np.ndarray = field(repr=False)
    mean_se: dict[str, float] = field(default_factory=dict)

    @property
    def usable(self) -> bool:
        return self.separation_rate <= 0.5

    def to_dict(self) -> dict:
        return {
            "replicates": self.replicates, "used": self.used, "alpha": self.alpha,
            "coverage": self.coverage_95, "mean_bias": self.mean_bias,
            "mean_se": self.mean_se, "separation_rate": self.separation_rate,
            "usable": self.usable,
        }


def _replicate(args) -> ReplicateOutcome:
    spec, r, cfg, hl_groups = args
    ds = generate(spec, r)
    try:
        fr = fit(ds, cfg)
    except FitError:
        return ReplicateOutcome(r, None, None, True, True, math.nan, math.nan)
    beta = fr.coefficients.aligned_to(spec.names)
    order = [0] + [1 + fr.names.index(n) for n in spec.names]
    se = fr.standard_errors[order]
    g_p = math.nan
    if spec.generators:
        g_p = g_test(fr.log_likelihood, null_log_likelihood(ds.y), len(spec.generators)).p
    try:
        hl_p = hosmer_lemeshow_from(ds.y, fitted_values(fr, ds), hl_groups).p
    except DegenerateBinError:
        hl_p = math.nan
    return ReplicateOutcome(r, beta, se, fr.separation_detected, False, g_p, hl_p)


def run_replicates(spec: SynthSpec, replicates: int, cfg: FitConfig = FitConfig(),
                   hl_groups: int = 10, n_jobs: int = 1) -> list[ReplicateOutcome]:
    jobs = [(spec, r, cfg, hl_groups) for r in range(replicates)]
    if n_jobs == 1:
        return [_replicate(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=n_jobs if n_jobs > 0 else None) as ex:
        return list(ex.map(_replicate, jobs, chunksize=max(1, replicates // 64)))


def coverage_experiment(spec: SynthSpec, replicates: int, alpha: float = 0.05,
                        cfg: FitConfig = FitConfig(), hl_groups: int = 10,
                        n_jobs: int = 1) -> MonteCarloReport:
    """Wald-interval coverage, bias and separation rate over seeded replicates.

    Coverage and bias are taken over replicates that were neither separated
    nor failed; ``used`` counts them.
    """
    if replicates < 100:
        raise ValueError("coverage_experiment needs at least 100 replicates")
    outcomes = run_replicates(spec, replicates, cfg, hl_groups, n_jobs)
    truth = spec.beta()
    names = (CoefficientVector.INTERCEPT,) + tuple(spec.names)
    good = [o for o in outcomes if not (o.separated or o.failed)]
    crit = normal_ppf(1 - alpha / 2)
    if good:
        est = np.array([o.estimate for o in good])
        se = np.array([o.se for o in good])
        hits = np.abs(est - truth) <= crit * se
        coverage = hits.mean(axis=0)
        bias = (est - truth).mean(axis=0)
        mean_se = se.mean(axis=0)
    else:
        coverage = bias = mean_se = np.full(truth.size, math.nan)
    return MonteCarloReport(
        replicates=replicates,
        names=names,
        coverage_95=dict(zip(names, map(float, coverage))),
        mean_bias=dict(zip(names, map(float, bias))),
        separation_rate=sum(o.separated for o in outcomes) / replicates,
        used=len(good),
        alpha=alpha,
        g_pvalues=np.array([o.g_p for o in outcomes]),
        hl_pvalues=np.array([o.hl_p for o in outcomes]),
        mean_se=dict(zip(names, map(float, mean_se))),
    )


def ks_uniform(pvalues) -> float:
    """Kolmogorov-Smirnov distance between sample and the U(0, 1) CDF (NaNs dropped)."""
    p = np.sort(np.asarray(pvalues, dtype=float))
    p = p[~np.isnan(p)]
    n = p.size
    if n == 0:
        raise ValueError("no p-values")
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - p), np.max(p - (i - 1) / n)))
