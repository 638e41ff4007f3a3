"""Survey dataset container, CSV ingestion and descriptive statistics.

A :class:`Dataset` is an immutable numeric matrix whose columns are described
by :class:`VariableSpec` entries. Exactly one column is the binary response;
the rest are predictors, either continuous or 0/1 dummies.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import IO, Iterable, Sequence

import numpy as np


class DataError(ValueError):
    """Raised when input data or a schema violates the dataset contract."""


class Role(str, Enum):
    RESPONSE = "response"
    CONTINUOUS = "continuous"
    DUMMY = "dummy"

    @classmethod
    def parse(cls, value: str) -> "Role":
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise DataError(
                f"unknown role {value!r}; expected one of "
                + ", ".join(r.value for r in cls)
            ) from None


@dataclass(frozen=True)
class VariableSpec:
    name: str
    role: Role
    description: str = ""

    def __post_init__(self):
        if not self.name:
            raise DataError("variable name must be non-empty")
        if not isinstance(self.role, Role):
            object.__setattr__(self, "role", Role.parse(self.role))


def _validate_specs(specs: Sequence[VariableSpec]) -> None:
    names = [s.name for s in specs]
    dupes = sorted({n for n in names if names.count(n) > 1})
    if dupes:
        raise DataError(f"duplicate variable names: {', '.join(dupes)}")
    n_resp = sum(s.role is Role.RESPONSE for s in specs)
    if n_resp != 1:
        raise DataError(f"schema must contain exactly one response variable, found {n_resp}")


@dataclass(frozen=True)
class Dataset:
    """Validated, read-only survey data.

    Parameters
    ----------
    specs : sequence of VariableSpec
        Column descriptions, in column order.
    rows : array-like of shape (n, m)
        Numeric observations; ``m == len(specs)``.
    """

    specs: tuple[VariableSpec, ...]
    rows: np.ndarray = field(repr=False)

    def __post_init__(self):
        specs = tuple(self.specs)
        _validate_specs(specs)
        rows = np.array(self.rows, dtype=float, copy=True)
        if rows.ndim != 2 or rows.shape[1] != len(specs):
            raise DataError(
                f"row matrix shape {rows.shape} does not match {len(specs)} variables"
            )
        if rows.shape[0] < 1:
            raise DataError("dataset must contain at least one observation")
        if not np.all(np.isfinite(rows)):
            bad = np.argwhere(~np.isfinite(rows))[0]
            raise DataError(
                f"missing or non-finite value at row {bad[0] + 1}, column {specs[bad[1]].name!r}"
            )
        for j, spec in enumerate(specs):
            if spec.role in (Role.RESPONSE, Role.DUMMY):
                col = rows[:, j]
                bad = np.flatnonzero((col != 0) & (col != 1))
                if bad.size:
                    i = bad[0]
                    raise DataError(
                        f"row {i + 1}, column {spec.name!r}: {spec.role.value} value "
                        f"{col[i]:g} not in {{0, 1}}"
                    )
        rows.setflags(write=False)
        object.__setattr__(self, "specs", specs)
        object.__setattr__(self, "rows", rows)

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def names(self) -> list[str]:
        return [s.name for s in self.specs]

    @property
    def response(self) -> VariableSpec:
        return next(s for s in self.specs if s.role is Role.RESPONSE)

    @property
    def predictors(self) -> list[VariableSpec]:
        return [s for s in self.specs if s.role is not Role.RESPONSE]

    def spec(self, name: str) -> VariableSpec:
        for s in self.specs:
            if s.name == name:
                return s
        raise DataError(f"unknown variable {name!r}")

    def column(self, name: str) -> np.ndarray:
        self.spec(name)
        return self.rows[:, self.names.index(name)]

    @property
    def y(self) -> np.ndarray:
        return self.column(self.response.name)

    @property
    def X(self) -> np.ndarray:
        """Predictor matrix (no intercept column), in schema order."""
        idx = [j for j, s in enumerate(self.specs) if s.role is not Role.RESPONSE]
        return self.rows[:, idx]

    def select(self, predictors: Iterable[str]) -> "Dataset":
        """Return a dataset restricted to the response plus ``predictors``."""
        keep = set(predictors)
        for name in keep:
            self.spec(name)
        idx = [
            j for j, s in enumerate(self.specs)
            if s.role is Role.RESPONSE or s.name in keep
        ]
        return Dataset(tuple(self.specs[j] for j in idx), self.rows[:, idx])

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return self.specs == other.specs and np.array_equal(self.rows, other.rows)

    __hash__ = None


@dataclass(frozen=True)
class DescriptiveStats:
    variable: str
    mean: float
    std_dev: float
    cv_percent: float | None
    n: int

    def to_dict(self) -> dict:
        return {
            "mean": self.mean,
            "std_dev": self.std_dev,
            "cv_percent": self.cv_percent,
            "n": self.n,
        }


@dataclass(frozen=True)
class FrequencyTable:
    variable: str
    bins: tuple[tuple[str, int, float], ...]

    @property
    def n(self) -> int:
        return sum(count for _, count, _ in self.bins)

    def to_dict(self) -> dict:
        return {
            "bins": [
                {"label": label, "count": count, "percent": pct}
                for label, count, pct in self.bins
            ]
        }


# -- schema & CSV -----------------------------------------------------------


def parse_schema(obj) -> list[VariableSpec]:
    """Build variable specs from a decoded JSON schema.

    Accepts either a list of ``{"name", "role", "description"}`` objects or a
    mapping with such a list under ``"variables"``.
    """
    if isinstance(obj, dict):
        obj = obj.get("variables")
    if not isinstance(obj, list) or not obj:
        raise DataError("schema must be a non-empty list of variable objects")
    specs = []
    for k, entry in enumerate(obj):
        if not isinstance(entry, dict) or "name" not in entry or "role" not in entry:
            raise DataError(f"schema entry {k} needs 'name' and 'role'")
        specs.append(
            VariableSpec(str(entry["name"]), Role.parse(entry["role"]),
                         str(entry.get("description", "")))
        )
    _validate_specs(specs)
    return specs


def load_schema(path) -> list[VariableSpec]:
    with open(path, encoding="utf-8") as fh:
        try:
            return parse_schema(json.load(fh))
        except json.JSONDecodeError as exc:
            raise DataError(f"schema is not valid JSON: {exc}") from None


def schema_to_json(specs: Sequence[VariableSpec]) -> list[dict]:
    return [
        {"name": s.name, "role": s.role.value, "description": s.description}
        for s in specs
    ]


def load_csv(source, schema: Sequence[VariableSpec]) -> Dataset:
    """Read a comma-separated file into a validated :class:`Dataset`.

    ``source`` may be a path, a text stream or a binary stream (decoded as
    UTF-8). Header names must match the schema up to order; the returned
    columns follow the schema order.
    """
    schema = list(schema)
    _validate_specs(schema)
    if isinstance(source, (str, bytes)) or hasattr(source, "__fspath__"):
        with open(source, encoding="utf-8", newline="") as fh:
            return _read_csv(fh, schema)
    if isinstance(source, io.RawIOBase | io.BufferedIOBase) or "b" in getattr(source, "mode", ""):
        source = io.TextIOWrapper(source, encoding="utf-8", newline="")
    return _read_csv(source, schema)


def _read_csv(fh: IO[str], schema: list[VariableSpec]) -> Dataset:
    reader = csv.reader(fh)
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise DataError("CSV input is empty (header row required)") from None
    if header and header[0].startswith("﻿"):
        header[0] = header[0][1:]
    wanted = [s.name for s in schema]
    if sorted(header) != sorted(wanted) or len(set(header)) != len(header):
        missing = sorted(set(wanted) - set(header))
        extra = sorted(set(header) - set(wanted))
        raise DataError(
            "CSV header does not match schema"
            + (f"; missing: {', '.join(missing)}" if missing else "")
            + (f"; unexpected: {', '.join(extra)}" if extra else "")
        )
    order = [header.index(name) for name in wanted]
    values = []
    for lineno, record in enumerate(reader, start=2):
        if not record or all(not cell.strip() for cell in record):
            continue
        if len(record) != len(header):
            raise DataError(
                f"line {lineno}: expected {len(header)} fields, got {len(record)}"
            )
        row = []
        for j in order:
            cell = record[j].strip()
            if cell == "":
                raise DataError(f"line {lineno}, column {header[j]!r}: missing value")
            try:
                x = float(cell)
            except ValueError:
                raise DataError(
                    f"line {lineno}, column {header[j]!r}: non-numeric value {cell!r}"
                ) from None
            if not math.isfinite(x):
                raise DataError(f"line {lineno}, column {header[j]!r}: non-finite value {cell!r}")
            row.append(x)
        values.append(row)
    if not values:
        raise DataError("CSV input contains no data rows")
    try:
        return Dataset(tuple(schema), np.array(values))
    except DataError as exc:
        # Dataset reports 1-based data rows; the header occupies line 1.
        raise DataError(f"{exc} (data row numbering excludes the header line)") from None


def format_number(x: float) -> str:
    """Canonical text for one cell: integers without a fraction, else shortest repr."""
    x = float(x)
    if x.is_integer() and abs(x) < 2**53:
        return str(int(x))
    return repr(x)


def write_csv(ds: Dataset, dest: IO[str]) -> None:
    dest.write(",".join(ds.names) + "\n")
    for row in ds.rows:
        dest.write(",".join(format_number(v) for v in row) + "\n")


def to_csv(ds: Dataset) -> str:
    buf = io.StringIO()
    write_csv(ds, buf)
    return buf.getvalue()


# -- statistics -------------------------------------------------------------


def describe(ds: Dataset, variable: str, *, strict: bool = False) -> DescriptiveStats:
    """Mean, sample standard deviation and coefficient of variation.

    ``cv_percent`` is ``None`` for a zero-mean column; with ``strict=True``
    that case raises instead.
    """
    x = ds.column(variable)
    n = x.size
    mean = float(np.mean(x))
    sd = float(np.std(x, ddof=1)) if n > 1 else 0.0
    if mean == 0.0:
        if strict:
            raise DataError(f"coefficient of variation undefined for {variable!r}: mean is 0")
        cv = None
    else:
        cv = 100.0 * sd / mean
    return DescriptiveStats(variable, mean, sd, cv, n)


def describe_all(ds: Dataset) -> list[DescriptiveStats]:
    return [describe(ds, name) for name in ds.names]


def screen_by_cv(ds: Dataset, threshold_percent: float = 10.0) -> tuple[list[str], list[str]]:
    """Split predictors into (retained, excluded) by coefficient of variation.

    Predictors with ``|CV|`` strictly below ``threshold_percent`` are excluded
    as too homogeneous to explain anything; the absolute value keeps
    negative-mean columns comparable. The response is never screened.
    """
    retained, excluded = [], []
    for spec in ds.predictors:
        stats = describe(ds, spec.name)
        if stats.cv_percent is None:
            raise DataError(
                f"cannot screen {spec.name!r}: coefficient of variation undefined (mean is 0)"
            )
        (excluded if abs(stats.cv_percent) < threshold_percent else retained).append(spec.name)
    return retained, excluded


def tabulate(ds: Dataset, variable: str, bin_edges: Sequence[float] | None = None) -> FrequencyTable:
    """Frequency table of one variable.

    Binary variables are tabulated over {0, 1}. Continuous variables need
    strictly increasing ``bin_edges``; bins are ``[a, b)`` except the last,
    which also includes its right edge.
    """
    spec = ds.spec(variable)
    x = ds.column(variable)
    n = x.size
    if bin_edges is None:
        if spec.role is Role.CONTINUOUS:
            raise DataError(f"bin edges are required to tabulate continuous variable {variable!r}")
        labels = ["0", "1"]
        counts = [int(np.sum(x == 0)), int(np.sum(x == 1))]
    else:
        edges = np.asarray(bin_edges, dtype=float)
        if edges.ndim != 1 or edges.size < 2:
            raise DataError("need at least two bin edges")
        if np.any(np.diff(edges) <= 0):
            raise DataError("bin edges must be strictly increasing")
        outside = (x < edges[0]) | (x > edges[-1])
        if np.any(outside):
            raise DataError(
                f"value {x[outside][0]:g} of {variable!r} lies outside all bins"
            )
        idx = np.searchsorted(edges, x, side="right") - 1
        idx[idx == edges.size - 1] = edges.size - 2
        counts = np.bincount(idx, minlength=edges.size - 1).tolist()
        labels = [
            f"[{format_number(a)}, {format_number(b)}{']' if k == edges.size - 2 else ')'}"
            for k, (a, b) in enumerate(zip(edges[:-1], edges[1:]))
        ]
    bins = tuple((label, int(c), 100.0 * c / n) for label, c in zip(labels, counts))
    return FrequencyTable(variable, bins)
