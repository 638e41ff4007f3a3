import math

import pytest

from logitdiag.reference import (
    COEFFICIENTS,
    GOODNESS_OF_FIT,
    N_PARTICIPANTS,
    N_RESPONDENTS,
    PAIRS,
    RESPONSE_PERCENT,
    consistency_report,
    odds_ratio_mismatches,
)


def test_x2_and_x6_odds_ratios_are_mismatches():
    bad = odds_ratio_mismatches()
    assert {"X2", "X6"} <= set(bad)
    assert bad["X2"] == (1.08, pytest.approx(math.exp(-2.526)))
    assert bad["X6"][1] > 1e12


def test_response_percentages():
    assert round(100 * N_PARTICIPANTS / N_RESPONDENTS, 2) == RESPONSE_PERCENT["1"]
    assert round(100 * (N_RESPONDENTS - N_PARTICIPANTS) / N_RESPONDENTS, 2) == RESPONSE_PERCENT["0"]


def test_pair_total_is_inconsistent():
    assert PAIRS["total"] != N_PARTICIPANTS * (N_RESPONDENTS - N_PARTICIPANTS)
    assert any("pair total" in line for line in consistency_report())


def test_gof_p_values_flagged():
    lines = consistency_report()
    for method in GOODNESS_OF_FIT:
        assert any(line.startswith(f"{method} p-value") for line in lines)


def test_report_lines_are_strings():
    lines = consistency_report()
    assert lines and all(isinstance(s, str) for s in lines)
    assert not any("X7 " in s and "odds" in s for s in lines)


@pytest.mark.parametrize("name", ["X1", "X3", "X4", "X7", "X8", "D1"])
def test_consistent_odds_ratios(name):
    coef, *_, printed = COEFFICIENTS[name]
    assert abs(math.exp(coef) - printed) <= 0.005


@pytest.mark.parametrize("name", sorted(__import__("logitdiag.reference", fromlist=["x"]).DESCRIPTIVES))
def test_printed_cv_loosely_consistent(name):
    from logitdiag.reference import DESCRIPTIVES
    sd, mean, printed = DESCRIPTIVES[name]
    assert abs(100 * sd / mean - printed) <= 1.5
