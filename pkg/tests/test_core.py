import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from logitdiag.core import (
    EPS,
    CoefficientVector,
    add_intercept,
    information_matrix,
    inverse_logit,
    linear_predictor,
    log_likelihood,
    logit,
    score,
)
from logitdiag.reference import COEFFICIENTS, DESCRIPTIVES
from logitdiag.validation import finite_difference_errors

finite = st.floats(-1e3, 1e3, allow_nan=False)


def test_linear_predictor_at_reference_means():
    # exact rational value of the dot product (computed with fractions)
    order = ["X1", "X2", "X3", "X4", "X5", "X6", "X7", "X8", "D1"]
    beta = [COEFFICIENTS["Constant"][0]] + [COEFFICIENTS[k][0] for k in order]
    x = [DESCRIPTIVES[k][1] for k in order]
    assert linear_predictor(beta, x) == pytest.approx(43.58462548, abs=1e-9)


def test_linear_predictor_shape_mismatch():
    with pytest.raises(ValueError, match="slopes"):
        linear_predictor([1.0, 2.0], [1.0, 2.0])


def test_linear_predictor_matrix():
    out = linear_predictor([1.0, 2.0, -1.0], [[1.0, 1.0], [0.0, 3.0]])
    np.testing.assert_allclose(out, [2.0, -2.0])


class TestInverseLogit:
    def test_zero(self):
        assert inverse_logit(0.0) == 0.5

    @pytest.mark.parametrize("z, expected", [(800.0, 1 - EPS), (-800.0, EPS)])
    def test_extremes_are_clamped(self, z, expected):
        assert inverse_logit(z) == expected

    def test_unclipped_extremes_are_finite(self):
        assert inverse_logit(800.0, clip=False) == 1.0
        assert inverse_logit(-800.0, clip=False) == 0.0
        # e^-700 / (1 + e^-700) to full precision
        assert inverse_logit(-700.0, clip=False) == pytest.approx(math.exp(-700.0), rel=1e-14)

    @given(finite)
    def test_symmetry(self, z):
        assert inverse_logit(-z, clip=False) == pytest.approx(1 - inverse_logit(z, clip=False), abs=1e-15)

    @given(finite, finite)
    def test_monotone(self, a, b):
        lo, hi = sorted((a, b))
        assert inverse_logit(lo) <= inverse_logit(hi)

    @given(arrays(float, st.integers(1, 20), elements=finite))
    def test_range(self, z):
        p = inverse_logit(z)
        assert np.all((p >= EPS) & (p <= 1 - EPS))


class TestLogit:
    @given(st.floats(-16, 16))
    def test_round_trip_within_1e9(self, z):
        assert logit(inverse_logit(z)) == pytest.approx(z, abs=1e-9)

    @given(st.floats(-30, 30))
    def test_round_trip_to_representable_precision(self, z):
        # beyond |z| ~ 16, 1 - pi carries about eps/(1 - pi) relative error,
        # and the clamp caps |logit| at ln((1 - EPS) / EPS) = 27.631
        cap = math.log((1 - EPS) / EPS)
        back = logit(inverse_logit(z))
        expected = max(-cap, min(cap, z))
        tol = 1e-9 + 2.3e-16 * math.exp(min(abs(z), cap))
        assert back == pytest.approx(expected, abs=tol)

    @pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.5, float("nan")])
    def test_domain(self, p):
        with pytest.raises(ValueError):
            logit(p)

    def test_participation_rate(self):
        assert logit(61 / 116) == pytest.approx(0.10354067894084, abs=1e-12)


def _random_problem(seed, n=40, k=3):
    rng = np.random.default_rng(seed)
    X = add_intercept(rng.normal(size=(n, k)))
    y = (rng.random(n) < 0.5).astype(float)
    return X, y, rng.normal(size=k + 1)


class TestLikelihood:
    def test_zero_coefficients(self):
        X, y, _ = _random_problem(0)
        assert log_likelihood(np.zeros(4), X, y) == pytest.approx(-40 * math.log(2))

    def test_finite_for_huge_linear_predictor(self):
        X = add_intercept(np.array([[1.0], [-1.0]]))
        ll = log_likelihood([0.0, 1e4], X, [0.0, 1.0])
        assert ll == pytest.approx(-2e4)

    @settings(max_examples=30)
    @given(st.integers(0, 10_000), st.floats(0.0, 1.0))
    def test_concave_along_segments(self, seed, t):
        X, y, b1 = _random_problem(seed)
        b2 = np.random.default_rng(seed + 1).normal(size=4)
        mid = log_likelihood(t * b1 + (1 - t) * b2, X, y)
        assert mid >= t * log_likelihood(b1, X, y) + (1 - t) * log_likelihood(b2, X, y) - 1e-9

    @pytest.mark.parametrize("seed", range(5))
    def test_derivatives_match_finite_differences(self, seed):
        X, y, beta = _random_problem(seed)
        g_err, H_err = finite_difference_errors(beta, X, y)
        assert g_err <= 1e-5 and H_err <= 1e-4

    def test_information_is_symmetric_psd(self):
        X, _, beta = _random_problem(3)
        H = information_matrix(beta, X)
        np.testing.assert_array_equal(H, H.T)
        assert np.linalg.eigvalsh(H).min() > 0

    def test_score_vanishes_at_null_mle(self):
        y = np.array([1.0] * 61 + [0.0] * 55)
        X = np.ones((116, 1))
        assert abs(score([logit(61 / 116)], X, y)[0]) < 1e-12

    def test_dimension_errors(self):
        with pytest.raises(ValueError, match="columns"):
            log_likelihood([0.0, 1.0], np.ones((3, 3)), [0, 1, 0])
        with pytest.raises(ValueError, match="responses"):
            score([0.0], np.ones((3, 1)), [0, 1])


class TestCoefficientVector:
    def test_alignment_by_name(self):
        cv = CoefficientVector(("a", "b"), [1.0, 2.0, 3.0])
        np.testing.assert_array_equal(cv.aligned_to(["b", "a"]), [1.0, 3.0, 2.0])
        assert cv.as_dict() == {"_intercept": 1.0, "a": 2.0, "b": 3.0}

    def test_mismatch(self):
        with pytest.raises(ValueError, match="slope names"):
            CoefficientVector(("a",), [1.0, 2.0, 3.0])
        with pytest.raises(ValueError, match="do not match"):
            CoefficientVector(("a",), [1.0, 2.0]).aligned_to(["c"])

    def test_immutable(self):
        cv = CoefficientVector(("a",), [1.0, 2.0])
        with pytest.raises(ValueError):
            cv.values[0] = 3.0
