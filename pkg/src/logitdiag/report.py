"""Assemble and render the full logit regression report.

Text and JSON output are both produced from one :class:`ReportDocument`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .data import Dataset, DescriptiveStats, describe_all, screen_by_cv
from .diagnostics import (
    AssociationResult,
    DegenerateBinError,
    GofResult,
    association,
    deviance_gof,
    hosmer_lemeshow,
    pearson_gof,
)
from .estimator import FitConfig, FitResult, fit, null_log_likelihood
from .inference import GTestResult, WaldRow, g_test, wald_test


@dataclass
class ReportDocument:
    n: int
    response: str
    events: int
    descriptives: list[DescriptiveStats]
    descriptions: dict[str, str]
    cv_threshold: float
    retained: list[str]
    excluded: list[str]
    fit: FitResult | None = None
    alpha: float = 0.05
    wald_rows: list[WaldRow] = field(default_factory=list)
    g_test: GTestResult | None = None
    gof: list[GofResult] = field(default_factory=list)
    association: AssociationResult | None = None
    flags: list[str] = field(default_factory=list)
    skipped: dict[str, str] = field(default_factory=dict)

    @property
    def separation(self) -> bool:
        return bool(self.fit and self.fit.separation_detected)

    def to_dict(self) -> dict:
        fr = self.fit
        return {
            "n": self.n,
            "response": self.response,
            "events": self.events,
            "descriptives": {
                d.variable: {**d.to_dict(), "description": self.descriptions.get(d.variable, "")}
                for d in self.descriptives
            },
            "screen": {"cv_threshold": self.cv_threshold,
                       "retained": self.retained, "excluded": self.excluded},
            "fit": None if fr is None else {
                "log_likelihood": fr.log_likelihood,
                "iterations": fr.iterations,
                "converged": fr.converged,
                "separation_detected": fr.separation_detected,
            },
            "alpha": self.alpha,
            "coefficients": [r.to_dict() for r in self.wald_rows],
            "g_test": self.g_test.to_dict() if self.g_test else None,
            "goodness_of_fit": [g.to_dict() for g in self.gof],
            "association": self.association.to_dict() if self.association else None,
            "flags": list(self.flags),
            "skipped": dict(self.skipped),
        }


def build_report(ds: Dataset, cv_threshold: float = 10.0, hl_groups: int = 10,
                 alpha: float = 0.05, cfg: FitConfig = FitConfig()) -> ReportDocument:
    """Screen, fit and run every test on ``ds``."""
    retained, excluded = screen_by_cv(ds, cv_threshold)
    doc = ReportDocument(
        n=ds.n,
        response=ds.response.name,
        events=int(ds.y.sum()),
        descriptives=describe_all(ds),
        descriptions={s.name: s.description for s in ds.specs},
        cv_threshold=cv_threshold,
        retained=retained,
        excluded=excluded,
        alpha=alpha,
    )
    model_ds = ds.select(retained)
    fr = fit(model_ds, cfg)
    doc.fit = fr
    names = ("Constant",) + fr.names
    for name, coef, se in zip(names, fr.coefficients.values, fr.standard_errors):
        doc.wald_rows.append(wald_test(float(coef), float(se), alpha, name))
    if fr.names:
        doc.g_test = g_test(fr.log_likelihood, null_log_likelihood(model_ds.y), len(fr.names))
    else:
        doc.skipped["g_test"] = "no predictors survived screening"
    doc.gof = [pearson_gof(fr, model_ds), deviance_gof(fr, model_ds)]
    try:
        doc.gof.append(hosmer_lemeshow(fr, model_ds, hl_groups))
    except DegenerateBinError as exc:
        doc.skipped["hosmer_lemeshow"] = str(exc)
    doc.association = association(fr, model_ds)
    if excluded:
        doc.flags.append(
            f"excluded by CV < {cv_threshold:g}%: {', '.join(excluded)}"
        )
    if fr.separation_detected:
        doc.flags.append("possible quasi-complete separation: estimates and Wald tests are unreliable")
    if not fr.converged:
        doc.flags.append("fit did not converge")
    doc.flags.extend(fr.messages)
    doc.flags.extend(g.warning for g in doc.gof if g.warning)
    return doc


def _sig(x: float) -> str:
    return f"{x:.6g}"


def _f3(x: float) -> str:
    return f"{x:.3f}"


def render_descriptives(rows: list[DescriptiveStats], descriptions: dict[str, str]) -> str:
    width = max([len("Definition")] + [len(descriptions.get(r.variable, "")) for r in rows])
    name_w = max([len("Variable")] + [len(r.variable) for r in rows])
    lines = [
        f"{'Variable':<{name_w}}  {'Definition':<{width}}  {'Stand.Dev':>12}  {'Average':>12}  {'CV (%)':>9}"
    ]
    for r in rows:
        cv = "undefined" if r.cv_percent is None else f"{r.cv_percent:.2f}"
        lines.append(
            f"{r.variable:<{name_w}}  {descriptions.get(r.variable, ''):<{width}}  "
            f"{_sig(r.std_dev):>12}  {_sig(r.mean):>12}  {cv:>9}"
        )
    return "\n".join(lines)


def render_text(doc: ReportDocument) -> str:
    out = []
    if doc.separation:
        out += ["*" * 72,
                "WARNING: possible quasi-complete separation detected.",
                "Coefficients diverge and standard errors are inflated.",
                "*" * 72, ""]
    out.append(f"Binary logit regression: {doc.response} (n = {doc.n}, {doc.events} events)")
    out.append("")
    out.append(render_descriptives(doc.descriptives, doc.descriptions))
    out.append("")
    out.append(f"CV screen at {doc.cv_threshold:g}%: retained {', '.join(doc.retained) or '(none)'}"
               f"; excluded {', '.join(doc.excluded) or '(none)'}")
    out.append("")
    name_w = max([len("Variables")] + [len(r.variable) for r in doc.wald_rows])
    ci = f"{100 * (1 - doc.alpha):g}% CI"
    out.append(
        f"{'Variables':<{name_w}}  {'Coefficient':>12}  {'Stand.Dev':>12}  {'Z':>8}  {'P':>6}  "
        f"{'Odds ratio':>10}  {ci:>21}"
    )
    for k, r in enumerate(doc.wald_rows):
        if k == 0:
            odds = f"{'NA':>10}  {'':>21}"
        else:
            odds = f"{_f3(r.odds_ratio):>10}  {_sig(r.or_ci_low):>10}, {_sig(r.or_ci_high):>9}"
        star = "*" if r.significant else " "
        out.append(
            f"{r.variable:<{name_w}}  {_sig(r.coefficient):>12}  {_sig(r.se):>12}  "
            f"{_f3(r.z):>8}  {_f3(r.p_two_sided):>6}{star} {odds}"
        )
    out.append("")
    out.append(f"Log-Likelihood = {_f3(doc.fit.log_likelihood)}")
    it = f"Iterations = {doc.fit.iterations}, converged = {'yes' if doc.fit.converged else 'no'}"
    out.append(it)
    if doc.g_test:
        g = doc.g_test
        out.append(f"Test that all slopes are zero: G = {_f3(g.g)}, DF = {g.df}, "
                   f"P-Value = {_f3(g.p)} (null Log-Likelihood = {_f3(g.ll_null)})")
    else:
        out.append(f"Test that all slopes are zero: skipped ({doc.skipped['g_test']})")
    out.append("")
    out.append("Goodness-of-Fit Tests")
    out.append(f"{'Method':<16}  {'Chi-Square':>10}  {'DF':>5}  {'P':>6}")
    for g in doc.gof:
        p = "NA" if g.p != g.p else _f3(g.p)
        out.append(f"{g.method.value:<16}  {_f3(g.statistic):>10}  {g.df:>5}  {p:>6}")
    if "hosmer_lemeshow" in doc.skipped:
        out.append(f"{'Hosmer-Lemeshow':<16}  skipped ({doc.skipped['hosmer_lemeshow']})")
    out.append("")
    a = doc.association
    out.append("Measures of Association:")
    out.append("(Between the Response Variable and Predicted Probabilities)")
    out.append(f"{'Pairs':<11} {'Number':>8} {'Percent':>8}   {'Summary Measures':<22} {'':>6}")
    pct = (lambda k: f"{100 * k / a.total_pairs:.1f}%")
    measures = [("Somers' D", a.somers_d), ("Goodman-Kruskal Gamma", a.gamma), ("Kendall's Tau-a", a.tau_a)]
    for (label, count), (mlabel, mval) in zip(
        [("Concordant", a.concordant), ("Discordant", a.discordant), ("Ties", a.ties)], measures
    ):
        out.append(f"{label:<11} {count:>8} {pct(count):>8}   {mlabel:<22} {_f3(mval):>6}")
    out.append(f"{'Total':<11} {a.total_pairs:>8} {'100.0%':>8}   {'AUC':<22} {_f3(a.auc):>6}")
    if doc.flags:
        out.append("")
        out.append("Notes:")
        out += [f"  - {f}" for f in doc.flags]
    return "\n".join(out) + "\n"
