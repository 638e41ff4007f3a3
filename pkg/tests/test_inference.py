import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from logitdiag.estimator import null_log_likelihood
from logitdiag.inference import g_test, odds_ratio, wald_test
from logitdiag.reference import COEFFICIENTS, G_DF, G_STATISTIC, LOG_LIKELIHOOD


def test_null_log_likelihood_116():
    ll0 = null_log_likelihood([1] * 61 + [0] * 55)
    assert ll0 == pytest.approx(-80.249831265980412, abs=1e-12)


def test_reference_g_test():
    ll0 = null_log_likelihood([1] * 61 + [0] * 55)
    res = g_test(LOG_LIKELIHOOD, ll0, G_DF)
    assert res.g == pytest.approx(G_STATISTIC, abs=0.01)
    assert res.df == 9
    assert 0 < res.p < 1e-20


def test_g_test_rejects_broken_fit():
    with pytest.raises(ValueError, match="broken"):
        g_test(-90.0, -80.0, 2)


def test_g_test_rounding_slack_clips_to_zero():
    res = g_test(-80.0 - 1e-12, -80.0, 1)
    assert res.g == 0.0 and res.p == 1.0


@pytest.mark.parametrize(
    "name", [k for k, v in COEFFICIENTS.items() if abs(v[2]) >= 0.1]
)
def test_reference_wald_z(name):
    coef, se, z, _, _ = COEFFICIENTS[name]
    assert round(wald_test(coef, se).z, 2) == z


def test_wald_boundaries():
    row = wald_test(1.96, 1.0)
    assert row.significant
    assert row.p_two_sided == pytest.approx(0.04999579029644087, abs=1e-12)
    assert not wald_test(1.9599, 1.0).significant
    assert wald_test(0.0, 1.0).p_two_sided == 1.0


def test_wald_confidence_interval_brackets_odds_ratio():
    row = wald_test(0.4254, 0.2858, variable="X7")
    assert row.or_ci_low < row.odds_ratio < row.or_ci_high
    assert row.or_ci_low == pytest.approx(math.exp(0.4254 - 1.959963984540054 * 0.2858), rel=1e-12)
    assert row.to_dict()["variable"] == "X7"


@pytest.mark.parametrize("se", [0.0, -1.0, float("nan")])
def test_wald_rejects_bad_se(se):
    with pytest.raises(ValueError):
        wald_test(1.0, se)


def test_odds_ratio_overflow():
    assert odds_ratio(1000.0) == math.inf
    assert odds_ratio(0.0) == 1.0


@given(st.floats(-30, 30), st.floats(1e-3, 1e3))
def test_wald_p_in_unit_interval_and_symmetric(c, se):
    a, b = wald_test(c, se), wald_test(-c, se)
    assert 0.0 <= a.p_two_sided <= 1.0
    assert a.p_two_sided == b.p_two_sided
    assert a.odds_ratio * b.odds_ratio == pytest.approx(1.0, rel=1e-12)


def test_printed_z_gives_textbook_p():
    assert wald_test(1.54, 1.0).p_two_sided == pytest.approx(0.1236, abs=5e-5)


def test_g_equals_deviance_difference(moderate_ds):
    from logitdiag.diagnostics import deviance_gof
    from logitdiag.estimator import fit

    fr = fit(moderate_ds)
    null_dev = -2 * null_log_likelihood(moderate_ds.y)
    res = g_test(fr.log_likelihood, null_log_likelihood(moderate_ds.y), 2)
    assert res.g == pytest.approx(null_dev - deviance_gof(fr, moderate_ds).statistic, abs=1e-9)


def test_g_p_values_uniform_under_null():
    from logitdiag.simulate import coverage_experiment, ks_uniform
    from logitdiag.validation import two_normal_spec

    rep = coverage_experiment(two_normal_spec(200, beta=(0.0, 0.0), seed=1), 1000)
    assert ks_uniform(rep.g_pvalues) <= 0.05
