"""Reduction of simulated prediction errors into accuracy measures.

The raw output of a run is a tensor of prediction errors indexed by
(generator, iteration, characteristic, strategy). It reduces over the
iteration axis into an S x P accuracy matrix, one row per (measure,
characteristic, generator) combination and one column per strategy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError

RMSE = "rmse"
QAPE = "qape"
MEASURE_KINDS = (RMSE, QAPE)


@dataclass(frozen=True)
class Measure:
    """An accuracy measure specification: rmse, or qape of order p."""

    kind: str
    p: float | None = None

    def __post_init__(self):
        if self.kind not in MEASURE_KINDS:
            raise ValueError(f"unknown measure kind {self.kind!r}")
        if self.kind == QAPE:
            if self.p is None or not 0.0 < self.p < 1.0:
                raise ValueError("qape measure needs order p in (0, 1)")
        elif self.p is not None:
            raise ValueError("rmse takes no order p")

    @property
    def label(self) -> str:
        return f"qape{self.p:g}" if self.kind == QAPE else self.kind

    def apply(self, errors: np.ndarray) -> float:
        if self.kind == RMSE:
            return rmse(errors)
        return qape(errors, self.p)


def rmse(errors: np.ndarray) -> float:
    """Root mean square of the error vector."""
    e = np.asarray(errors, dtype=np.float64).ravel()
    if e.size == 0:
        raise ValueError("rmse of an empty error vector")
    if not np.all(np.isfinite(e)):
        raise ValueError("rmse: errors contain non-finite values")
    return float(np.sqrt(np.mean(e**2)))


def qape(errors: np.ndarray, p: float) -> float:
    """Inf-type p-quantile of the absolute errors.

    Sorted ascending, the value at 1-based index ceil(p * B) is returned:
    the smallest x for which at least a fraction p of |errors| is <= x.
    No interpolation.
    """
    e = np.asarray(errors, dtype=np.float64).ravel()
    if e.size == 0:
        raise ValueError("qape of an empty error vector")
    if not np.all(np.isfinite(e)):
        raise ValueError("qape: errors contain non-finite values")
    if not 0.0 < p < 1.0:
        raise ValueError("qape order p must lie in (0, 1)")
    ordered = np.sort(np.abs(e))
    index = min(max(math.ceil(p * ordered.size), 1), ordered.size)
    return float(ordered[index - 1])


@dataclass
class ErrorTensor:
    """Simulated prediction errors, indexed (generator, iteration, characteristic, strategy).

    failure_mask marks (g, b, p) cells whose strategy fit failed; masked
    cells are excluded from every reduction.
    """

    values: np.ndarray
    failure_mask: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        self.failure_mask = np.asarray(self.failure_mask, dtype=bool)
        if self.values.ndim != 4:
            raise ValueError("error tensor must have 4 axes (g, b, c, p)")
        g, b, _, p = self.values.shape
        if self.failure_mask.shape != (g, b, p):
            raise ValueError("failure_mask shape must be (g, b, p)")
        unmasked = self.values[~np.broadcast_to(self.failure_mask[:, :, None, :], self.values.shape)]
        if unmasked.size and not np.all(np.isfinite(unmasked)):
            raise ValueError("unmasked error entries must be finite")

    @property
    def dims(self) -> tuple[int, int, int, int]:
        return self.values.shape

    def effective_iterations(self) -> np.ndarray:
        """Surviving iteration count per (generator, strategy)."""
        return self.values.shape[1] - self.failure_mask.sum(axis=1)


@dataclass
class AccuracyMatrix:
    """S x P matrix of accuracy values; rows are (generator, characteristic, measure) voters.

    Row order is measure-major, then characteristic, then generator, and is
    frozen so outputs stay comparable across runs. Entries are nonnegative
    by construction of the measures.
    """

    entries: np.ndarray
    row_labels: list
    col_labels: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.entries = np.atleast_2d(np.asarray(self.entries, dtype=np.float64))
        if len(self.row_labels) != self.entries.shape[0]:
            raise ValueError("row_labels length does not match row count")
        if len(self.col_labels) != self.entries.shape[1]:
            raise ValueError("col_labels length does not match column count")
        if not np.all(np.isfinite(self.entries)):
            raise DataError("accuracy matrix entries must be finite")
        if np.any(self.entries < 0):
            raise DataError("accuracy matrix entries must be nonnegative")

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape


def build_accuracy_matrix(
    tensor: ErrorTensor,
    measures: list[Measure],
    generator_labels: list[str] | None = None,
    characteristic_labels: list[str] | None = None,
    strategy_names: list[str] | None = None,
) -> AccuracyMatrix:
    """Reduce an error tensor into the S x P accuracy matrix, S = G*C*M.

    Masked iterations are dropped per (generator, strategy); fewer than two
    surviving iterations for any such pair is an assembly error.
    """
    if not measures:
        raise ValueError("need at least one measure")
    g_count, b_count, c_count, p_count = tensor.dims
    gens = generator_labels or [f"g{i + 1}" for i in range(g_count)]
    chars = characteristic_labels or [f"c{i + 1}" for i in range(c_count)]
    strategies = strategy_names or [f"p{i + 1}" for i in range(p_count)]
    if len(gens) != g_count or len(chars) != c_count or len(strategies) != p_count:
        raise ValueError("label lists do not match tensor dimensions")

    effective = tensor.effective_iterations()
    for g in range(g_count):
        for p in range(p_count):
            if effective[g, p] < 2:
                raise DataError(
                    f"generator {gens[g]!r}, strategy {strategies[p]!r}: "
                    f"only {int(effective[g, p])} of {b_count} iterations survived fit failures"
                )

    rows = np.empty((len(measures) * c_count * g_count, p_count))
    labels = []
    r = 0
    for m in measures:
        for c in range(c_count):
            for g in range(g_count):
                for p in range(p_count):
                    keep = ~tensor.failure_mask[g, :, p]
                    rows[r, p] = m.apply(tensor.values[g, keep, c, p])
                labels.append((gens[g], chars[c], m.label))
                r += 1
    return AccuracyMatrix(entries=rows, row_labels=labels, col_labels=list(strategies))
