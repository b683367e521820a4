"""Tabular data loading and encoding into fixed design matrices.

A study frame splits the units of interest into an observed sample block
(covariates plus response) and an out-of-sample block (covariates only).
Categorical covariates are dummy-coded against the alphabetically first
level so that parametric design matrices stay full rank.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DataError

NUMERIC = "numeric"
CATEGORICAL = "categorical"

_TRUE_TOKENS = {"1", "true"}
_FALSE_TOKENS = {"0", "false"}


@dataclass(frozen=True)
class ColumnSchema:
    """Describes how CSV columns map onto response, covariates and the sample flag.

    covariates is an ordered sequence of (name, kind) pairs with kind either
    "numeric" or "categorical".
    """

    response: str
    covariates: tuple[tuple[str, str], ...]
    sample_flag: str

    def __post_init__(self):
        object.__setattr__(self, "covariates", tuple((str(n), str(k)) for n, k in self.covariates))
        names = [n for n, _ in self.covariates]
        if len(set(names)) != len(names):
            raise DataError("duplicate covariate names in schema")
        for n, k in self.covariates:
            if k not in (NUMERIC, CATEGORICAL):
                raise DataError(f"covariate {n!r}: unknown kind {k!r}")
        reserved = {self.response, self.sample_flag}
        if len(reserved) != 2 or reserved & set(names):
            raise DataError("response, sample_flag and covariate names must be distinct")


@dataclass
class StudyFrame:
    """Fixed design matrices for sample and out-of-sample units.

    x_sample is n x q, x_out is k x q with identical column order; y_sample
    holds the observed responses for the sample block. Arrays are frozen
    after construction and safe to share across threads.
    """

    x_sample: np.ndarray
    y_sample: np.ndarray
    x_out: np.ndarray
    column_names: list[str]
    unit_ids: list[str] | None = None

    def __post_init__(self):
        self.x_sample = np.atleast_2d(np.asarray(self.x_sample, dtype=np.float64))
        self.x_out = np.asarray(self.x_out, dtype=np.float64).reshape(-1, self.x_sample.shape[1])
        self.y_sample = np.asarray(self.y_sample, dtype=np.float64).ravel()
        if self.x_sample.shape[0] < 1:
            raise DataError("sample block must contain at least one row")
        if self.x_sample.shape[0] != self.y_sample.shape[0]:
            raise DataError("x_sample and y_sample row counts differ")
        if self.x_sample.shape[1] != len(self.column_names):
            raise DataError("column_names length does not match design width")
        if not np.all(np.isfinite(self.x_sample)) or not np.all(np.isfinite(self.x_out)):
            raise DataError("design matrices contain non-finite values")
        if not np.all(np.isfinite(self.y_sample)):
            raise DataError("y_sample contains non-finite values")
        if self.unit_ids is not None and len(self.unit_ids) != self.n + self.k:
            raise DataError("unit_ids must have length n + k")
        for a in (self.x_sample, self.x_out, self.y_sample):
            a.setflags(write=False)

    @property
    def n(self) -> int:
        return self.x_sample.shape[0]

    @property
    def k(self) -> int:
        # k = 0 frames are permitted structurally (prediction on the sample
        # alone); the loaders below require at least one out-of-sample row.
        return self.x_out.shape[0]

    @property
    def q(self) -> int:
        return self.x_sample.shape[1]

    @property
    def x_full(self) -> np.ndarray:
        """All n + k design rows, sample block first."""
        return np.vstack([self.x_sample, self.x_out])


def _cell(row: dict[str, str], column: str, index: int) -> str:
    value = row.get(column)
    if value is None:
        raise DataError(f"column {column!r}, row {index}: missing cell")
    return value


def _parse_flag(token: str, column: str, index: int) -> bool:
    t = token.strip().lower()
    if t in _TRUE_TOKENS:
        return True
    if t in _FALSE_TOKENS:
        return False
    raise DataError(f"column {column!r}, row {index}: sample flag must be binary (0/1/true/false), got {token!r}")


def _parse_number(token: str, column: str, index: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise DataError(f"column {column!r}, row {index}: cannot parse {token!r} as a number") from None
    if not math.isfinite(value):
        raise DataError(f"column {column!r}, row {index}: non-finite value {token!r}")
    return value


def encode_table(rows: list[dict[str, str]], schema: ColumnSchema) -> StudyFrame:
    """Encode raw string records into a StudyFrame.

    Sample/out rows are split by the schema's flag column. Categorical
    covariates are dummy-coded with the alphabetically first sample-observed
    level dropped; a level appearing only in the out-of-sample block is an
    error. Response cells on out-of-sample rows are ignored with a warning.
    Row indices in error messages are 1-based data rows.
    """
    if not rows:
        raise DataError("no data rows")
    flags = [
        _parse_flag(_cell(r, schema.sample_flag, i + 1), schema.sample_flag, i + 1)
        for i, r in enumerate(rows)
    ]
    sample_idx = [i for i, f in enumerate(flags) if f]
    out_idx = [i for i, f in enumerate(flags) if not f]
    if not sample_idx:
        raise DataError("no rows flagged as in-sample")
    if not out_idx:
        raise DataError("no rows flagged as out-of-sample")

    y = np.array([_parse_number(_cell(rows[i], schema.response, i + 1), schema.response, i + 1) for i in sample_idx])
    ignored = sum(1 for i in out_idx if _cell(rows[i], schema.response, i + 1).strip())
    if ignored:
        warnings.warn(f"ignoring response values on {ignored} out-of-sample row(s)", stacklevel=2)

    # Per-covariate encoded blocks, schema order; categorical levels are
    # fixed by the sample block only.
    names: list[str] = []
    sample_cols: list[np.ndarray] = []
    out_cols: list[np.ndarray] = []
    for cov_name, kind in schema.covariates:
        if kind == NUMERIC:
            names.append(cov_name)
            sample_cols.append(
                np.array([_parse_number(_cell(rows[i], cov_name, i + 1), cov_name, i + 1) for i in sample_idx])
            )
            out_cols.append(
                np.array([_parse_number(_cell(rows[i], cov_name, i + 1), cov_name, i + 1) for i in out_idx])
            )
            continue
        sample_levels = [_cell(rows[i], cov_name, i + 1).strip() for i in sample_idx]
        out_levels = [_cell(rows[i], cov_name, i + 1).strip() for i in out_idx]
        if "" in sample_levels or "" in out_levels:
            raise DataError(f"column {cov_name!r}: empty categorical cell")
        levels = sorted(set(sample_levels))
        if len(levels) < 2:
            raise DataError(f"column {cov_name!r}: needs at least 2 levels in the sample block, found {levels}")
        unseen = sorted(set(out_levels) - set(levels))
        if unseen:
            raise DataError(f"column {cov_name!r}: level {unseen[0]!r} appears out-of-sample but never in the sample")
        for level in levels[1:]:  # reference level = levels[0]
            names.append(f"{cov_name}={level}")
            sample_cols.append(np.array([1.0 if v == level else 0.0 for v in sample_levels]))
            out_cols.append(np.array([1.0 if v == level else 0.0 for v in out_levels]))

    if not names:
        raise DataError("schema declares no covariates")
    return StudyFrame(
        x_sample=np.column_stack(sample_cols),
        y_sample=y,
        x_out=np.column_stack(out_cols),
        column_names=names,
    )


def load_csv(path: str, schema: ColumnSchema) -> StudyFrame:
    """Load a headered CSV file and encode it according to the schema."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        needed = [schema.response, schema.sample_flag] + [n for n, _ in schema.covariates]
        missing = [c for c in needed if c not in header]
        if missing:
            raise DataError(f"{path}: missing column(s) {missing}")
        rows = list(reader)
    return encode_table(rows, schema)


def write_csv(frame: StudyFrame, path: str, response_name: str = "response", flag_name: str = "insample") -> None:
    """Serialize an encoded frame; floats use repr so reloading is exact."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([response_name, *frame.column_names, flag_name])
        for i in range(frame.n):
            writer.writerow([repr(float(frame.y_sample[i])), *[repr(float(v)) for v in frame.x_sample[i]], "1"])
        for i in range(frame.k):
            writer.writerow(["", *[repr(float(v)) for v in frame.x_out[i]], "0"])


def encoded_schema(frame: StudyFrame, response_name: str = "response", flag_name: str = "insample") -> ColumnSchema:
    """Schema describing a file produced by write_csv (all-numeric covariates)."""
    return ColumnSchema(
        response=response_name,
        covariates=tuple((name, NUMERIC) for name in frame.column_names),
        sample_flag=flag_name,
    )


# Synthetic motor-insurance portfolio. The category sets mirror a typical
# policy table (gender, district type, payment channel, engine, age group);
# the response is drawn from a log-linear model in these factors, so it is
# strictly positive. Real zero-inflated claim data needs user preprocessing
# before it fits the positive-response model families.
_PORTFOLIO_FACTORS: tuple[tuple[str, tuple[str, ...]], ...] = (
    ("gender", ("female", "male")),
    ("district", ("country", "suburban", "urban")),
    ("payment", ("cash", "transfer")),
    ("engine", ("ben", "die")),
    ("age_group", ("1", "2", "3")),
)
_PORTFOLIO_EFFECTS: dict[tuple[str, str], float] = {
    ("gender", "male"): -0.08,
    ("district", "suburban"): 0.12,
    ("district", "urban"): 0.25,
    ("payment", "transfer"): 0.05,
    ("engine", "die"): 0.18,
    ("age_group", "2"): 0.10,
    ("age_group", "3"): 0.16,
}
_PORTFOLIO_INTERCEPT = 7.6
_PORTFOLIO_SIGMA = 0.75
_PORTFOLIO_RESPONSE = "claim_amount"
_PORTFOLIO_FLAG = "insample"


def portfolio_schema() -> ColumnSchema:
    """Schema matching synthesize_portfolio / write_portfolio_csv output."""
    return ColumnSchema(
        response=_PORTFOLIO_RESPONSE,
        covariates=tuple((name, CATEGORICAL) for name, _ in _PORTFOLIO_FACTORS),
        sample_flag=_PORTFOLIO_FLAG,
    )


def _portfolio_rows(n: int, k: int, seed: int) -> list[dict[str, str]]:
    if n < 10:
        raise DataError("synthetic portfolio needs n >= 10")
    if k < 1:
        raise DataError("synthetic portfolio needs k >= 1")
    rng = np.random.default_rng(seed)
    total = n + k
    draws = {name: rng.integers(0, len(levels), size=total) for name, levels in _PORTFOLIO_FACTORS}
    eta = np.full(total, _PORTFOLIO_INTERCEPT)
    for name, levels in _PORTFOLIO_FACTORS:
        for j, level in enumerate(levels):
            effect = _PORTFOLIO_EFFECTS.get((name, level), 0.0)
            if effect:
                eta[draws[name] == j] += effect
    y = np.exp(eta + _PORTFOLIO_SIGMA * rng.standard_normal(total))
    rows = []
    for i in range(total):
        row = {name: levels[draws[name][i]] for name, levels in _PORTFOLIO_FACTORS}
        row[_PORTFOLIO_RESPONSE] = repr(float(y[i])) if i < n else ""
        row[_PORTFOLIO_FLAG] = "1" if i < n else "0"
        rows.append(row)
    return rows


def synthesize_portfolio(n: int, k: int, seed: int) -> StudyFrame:
    """Deterministic synthetic portfolio with the standard risk factors.

    After reference coding the five categorical factors the frame has
    q = 1 + 2 + 1 + 1 + 2 = 7 columns.
    """
    return encode_table(_portfolio_rows(n, k, seed), portfolio_schema())


def write_portfolio_csv(path: str, n: int, k: int, seed: int) -> None:
    """Write the raw (pre-encoding) synthetic portfolio as a CSV file."""
    rows = _portfolio_rows(n, k, seed)
    fields = [_PORTFOLIO_RESPONSE] + [name for name, _ in _PORTFOLIO_FACTORS] + [_PORTFOLIO_FLAG]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        writer.writerows(rows)
