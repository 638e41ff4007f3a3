import io
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from logitdiag.data import (
    DataError,
    Dataset,
    Role,
    VariableSpec,
    describe,
    load_csv,
    parse_schema,
    screen_by_cv,
    tabulate,
    to_csv,
)
from logitdiag.simulate import generate, survey_spec

SCHEMA = [VariableSpec("Y", Role.RESPONSE), VariableSpec("X1", Role.CONTINUOUS)]


def ds_from(columns: dict, roles=None):
    roles = roles or {}
    specs = tuple(
        VariableSpec(k, roles.get(k, Role.RESPONSE if k == "Y" else Role.CONTINUOUS))
        for k in columns
    )
    return Dataset(specs, np.column_stack([np.asarray(v, float) for v in columns.values()]))


class TestLoadCsv:
    def test_minimal_file(self):
        ds = load_csv(io.BytesIO(b"Y,X1\n1,50\n0,120\n"), SCHEMA)
        assert ds.n == 2
        assert ds.response.name == "Y"
        np.testing.assert_array_equal(ds.rows, [[1, 50], [0, 120]])

    def test_header_order_is_free_but_schema_order_wins(self):
        ds = load_csv(io.StringIO("X1,Y\n50,1\n120,0\n"), SCHEMA)
        assert ds.names == ["Y", "X1"]
        np.testing.assert_array_equal(ds.y, [1, 0])

    def test_response_out_of_domain_names_row_and_column(self):
        with pytest.raises(DataError, match=r"row 1, column 'Y'.*not in \{0, 1\}"):
            load_csv(io.StringIO("Y,X1\n2,50\n"), SCHEMA)

    @pytest.mark.parametrize(
        "text, match",
        [
            ("Y,X2\n1,3\n", "header does not match"),
            ("Y,X1\n1,abc\n", "non-numeric"),
            ("Y,X1\n1,\n", "missing value"),
            ("Y,X1\n1\n", "expected 2 fields"),
            ("", "empty"),
            ("Y,X1\n", "no data rows"),
            ("Y,X1\n1,nan\n", "non-finite"),
        ],
    )
    def test_rejections(self, text, match):
        with pytest.raises(DataError, match=match):
            load_csv(io.StringIO(text), SCHEMA)

    def test_dummy_column_checked(self):
        schema = SCHEMA + [VariableSpec("D1", Role.DUMMY)]
        with pytest.raises(DataError, match="'D1'"):
            load_csv(io.StringIO("Y,X1,D1\n1,2,0.5\n"), schema)

    def test_survey_shaped_round_trip(self, tmp_path):
        ds = generate(survey_spec())
        path = tmp_path / "survey.csv"
        path.write_text(to_csv(ds))
        back = load_csv(path, ds.specs)
        assert (back.n, len(back.names)) == (116, 10)
        assert back == ds
        assert to_csv(back) == path.read_text()


def test_schema_validation():
    with pytest.raises(DataError, match="exactly one response"):
        parse_schema([{"name": "a", "role": "continuous"}])
    with pytest.raises(DataError, match="duplicate"):
        parse_schema([{"name": "Y", "role": "response"}, {"name": "Y", "role": "dummy"}])
    with pytest.raises(DataError, match="unknown role"):
        parse_schema([{"name": "Y", "role": "outcome"}])
    specs = parse_schema({"variables": [{"name": "Y", "role": "Response"}]})
    assert specs[0].role is Role.RESPONSE


def test_dataset_is_read_only():
    ds = ds_from({"Y": [0, 1], "X1": [1, 2]})
    with pytest.raises(ValueError):
        ds.rows[0, 0] = 5


class TestDescribe:
    def test_reference_row_cv(self):
        # sd 0.89 / mean 3.69; printed 24.09 comes from unrounded moments
        ds = ds_from({"Y": [0, 1], "X": [3.69 - 0.89 / np.sqrt(2), 3.69 + 0.89 / np.sqrt(2)]})
        st_ = describe(ds, "X")
        assert st_.std_dev == pytest.approx(0.89)
        assert st_.cv_percent == pytest.approx(24.119241192, abs=1e-9)
        assert abs(st_.cv_percent - 24.09) <= 0.5

    def test_constant_column(self):
        st_ = describe(ds_from({"Y": [0, 1, 1], "X": [5.0] * 3}), "X")
        assert (st_.std_dev, st_.cv_percent) == (0.0, 0.0)

    def test_binary_column_sample_sd(self):
        st_ = describe(ds_from({"Y": [0, 0, 1, 1]}), "Y")
        assert st_.std_dev == pytest.approx(0.5773502692)
        assert st_.cv_percent == pytest.approx(115.4700538, abs=1e-6)

    def test_zero_mean(self):
        ds = ds_from({"Y": [0, 1], "X": [-1.0, 1.0]})
        assert describe(ds, "X").cv_percent is None
        with pytest.raises(DataError, match="undefined"):
            describe(ds, "X", strict=True)

    def test_unknown_variable(self):
        with pytest.raises(DataError, match="unknown variable"):
            describe(ds_from({"Y": [0, 1]}), "Z")

    @given(st.lists(st.floats(0.1, 1e3), min_size=2, max_size=40),
           st.floats(1e-3, 1e3))
    def test_scaling_leaves_cv_unchanged(self, xs, k):
        base = describe(ds_from({"Y": [0] * len(xs), "X": xs}), "X")
        scaled = describe(ds_from({"Y": [0] * len(xs), "X": np.array(xs) * k}), "X")
        assert scaled.mean == pytest.approx(k * base.mean, rel=1e-12)
        assert scaled.std_dev == pytest.approx(k * base.std_dev, rel=1e-9, abs=1e-12 * k * base.mean)
        if base.std_dev > 1e-6 * base.mean:
            assert scaled.cv_percent == pytest.approx(base.cv_percent, rel=1e-9)


class TestScreen:
    def test_reference_moments_retain_everything(self):
        from logitdiag.reference import DESCRIPTIVES
        cvs = {k: 100 * sd / m for k, (sd, m, _) in DESCRIPTIVES.items() if k != "Y"}
        assert min(cvs.values()) == pytest.approx(14.95, abs=0.01)
        assert all(cv >= 10 for cv in cvs.values())

    def test_low_cv_excluded(self):
        rng = np.random.default_rng(3)
        a = rng.normal(0, 1, 400)
        a = 100 + 5 * (a - a.mean()) / a.std(ddof=1)
        b = 10 + 5 * (a - 100) / 5 * 1.0
        ds = ds_from({"Y": (a > 100).astype(float), "A": a, "B": b})
        assert describe(ds, "A").cv_percent == pytest.approx(5.0)
        assert describe(ds, "B").cv_percent == pytest.approx(50.0)
        assert screen_by_cv(ds) == (["B"], ["A"])
        assert screen_by_cv(ds, 0) == (["A", "B"], [])

    def test_negative_mean_uses_absolute_cv(self):
        ds = ds_from({"Y": [0, 1, 0, 1], "X": [-1.0, -5.0, -2.0, -8.0]})
        assert describe(ds, "X").cv_percent < 0
        assert screen_by_cv(ds) == (["X"], [])

    def test_response_never_screened(self):
        ds = ds_from({"Y": [1, 1, 1, 0] * 5, "X": np.arange(20.0) + 1})
        retained, excluded = screen_by_cv(ds, threshold_percent=1e6)
        assert "Y" not in retained + excluded

    def test_zero_mean_predictor_errors_by_name(self):
        with pytest.raises(DataError, match="'X'"):
            screen_by_cv(ds_from({"Y": [0, 1], "X": [-2.0, 2.0]}))

    @settings(max_examples=50)
    @given(st.floats(0, 200), st.floats(0, 200))
    def test_monotone_in_threshold(self, t1, t2):
        lo, hi = sorted((t1, t2))
        ds = generate(survey_spec())
        _, ex_lo = screen_by_cv(ds, lo)
        _, ex_hi = screen_by_cv(ds, hi)
        assert set(ex_lo) <= set(ex_hi)


class TestTabulate:
    def test_response_split(self):
        ds = ds_from({"Y": [1] * 61 + [0] * 55})
        t = tabulate(ds, "Y")
        assert [(lbl, c) for lbl, c, _ in t.bins] == [("0", 55), ("1", 61)]
        assert round(t.bins[0][2], 2) == 47.41
        assert round(t.bins[1][2], 2) == 52.59

    def test_age_bins(self):
        ds = ds_from({"Y": [0, 1, 0], "Age": [8, 13, 16]})
        t = tabulate(ds, "Age", [8, 13, 16, 20])
        assert [c for _, c, _ in t.bins] == [1, 1, 1]
        assert [round(p, 2) for _, _, p in t.bins] == [33.33] * 3
        assert [lbl for lbl, _, _ in t.bins] == ["[8, 13)", "[13, 16)", "[16, 20]"]

    def test_single_bin(self):
        ds = ds_from({"Y": [0, 1, 0], "X": [1.0, 2.0, 3.0]})
        assert tabulate(ds, "X", [0, 10]).bins[0][1:] == (3, 100.0)

    def test_errors(self):
        ds = ds_from({"Y": [0, 1, 0], "X": [1.0, 2.0, 30.0]})
        with pytest.raises(DataError, match="strictly increasing"):
            tabulate(ds, "X", [0, 5, 5])
        with pytest.raises(DataError, match="outside"):
            tabulate(ds, "X", [0, 5, 10])
        with pytest.raises(DataError, match="required"):
            tabulate(ds, "X")

    @given(st.lists(st.floats(-50, 50), min_size=1, max_size=60),
           st.lists(st.floats(1e-3, 10), min_size=1, max_size=8))
    def test_partition(self, xs, widths):
        edges = np.concatenate([[-50.0], -50.0 + np.cumsum(widths) * (100 / sum(widths))])
        edges[-1] = 50.0
        if np.any(np.diff(edges) <= 0):
            return
        ds = ds_from({"Y": [0] * len(xs), "X": xs})
        t = tabulate(ds, "X", edges)
        assert sum(c for _, c, _ in t.bins) == len(xs)
        assert sum(p for _, _, p in t.bins) == pytest.approx(100.0, abs=1e-9)


def test_json_outputs_round_trip():
    ds = ds_from({"Y": [0, 1, 1], "X": [0.1, 0.2, 0.3000000000000001]})
    d = describe(ds, "X").to_dict()
    assert json.loads(json.dumps(d)) == d
    assert json.loads(json.dumps(tabulate(ds, "Y").to_dict()))["bins"][1]["count"] == 2
