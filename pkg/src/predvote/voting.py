"""Voting systems that elect a prediction strategy from an accuracy matrix.

Rows of the accuracy matrix act as voters, columns as candidates. Four
systems are implemented, differing in how a row is transformed and how the
per-candidate criterion is reduced:

  fptp        indicator of the row minimum (ties split fractionally),
              criterion = column sums, highest wins.
  positional  ranks P (best = row minimum) down to 1, midranks on ties,
              criterion = column medians, highest wins.
  evaluative  per-row min-max scores a' = 1 - (a - min)/(max - min),
              criterion = column medians, highest wins.
  ecdf_auc    same scored matrix; criterion = area under each column's
              empirical CDF over [0, 1], smallest wins.

The ECDF area satisfies the closed form AUC = 1 - column mean for values
in [0, 1]. First/second-order stochastic dominance between score columns
is available as a diagnostic; dominance implies a better ecdf_auc value.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .accuracy import AccuracyMatrix

FPTP = "fptp"
POSITIONAL = "positional"
EVALUATIVE = "evaluative"
ECDF_AUC = "ecdf_auc"

TRANSFORM_FPTP = "fptp"
TRANSFORM_POSITIONAL = "positional"
TRANSFORM_SCALED = "scaled"

HIGHER_BETTER = "higher_better"
LOWER_BETTER = "lower_better"


@dataclass
class VotingMatrix:
    entries: np.ndarray
    transform: str
    row_labels: list
    col_labels: list[str]

    def __post_init__(self):
        self.entries = np.atleast_2d(np.asarray(self.entries, dtype=np.float64))
        if self.transform not in (TRANSFORM_FPTP, TRANSFORM_POSITIONAL, TRANSFORM_SCALED):
            raise ValueError(f"unknown transform {self.transform!r}")


@dataclass
class SelectionResult:
    """Criterion values per strategy and the (possibly tied) winner set."""

    system: str
    criterion_values: np.ndarray
    winners: tuple[str, ...]
    direction: str

    def __post_init__(self):
        if not self.winners:
            raise ValueError("winner set cannot be empty")


def _winners(values: np.ndarray, names: list[str], direction: str) -> tuple[str, ...]:
    best = values.min() if direction == LOWER_BETTER else values.max()
    return tuple(name for name, v in zip(names, values) if v == best)


def _midranks_desc(row: np.ndarray) -> np.ndarray:
    """Rank P for the smallest value down to 1 for the largest; ties get midranks."""
    p = row.size
    order = np.argsort(row, kind="stable")
    ranks = np.empty(p)
    i = 0
    while i < p:
        j = i
        while j + 1 < p and row[order[j + 1]] == row[order[i]]:
            j += 1
        # positions i..j (0-based, ascending) share the descending midrank
        midrank = p - (i + j) / 2.0
        ranks[order[i : j + 1]] = midrank
        i = j + 1
    return ranks


def fptp_vote(matrix: AccuracyMatrix) -> tuple[VotingMatrix, SelectionResult]:
    """First-past-the-post: each row gives its full single vote to the minimum."""
    a = matrix.entries
    w = np.zeros_like(a)
    row_min = a.min(axis=1, keepdims=True)
    ties = a == row_min
    w[ties] = 1.0
    w /= ties.sum(axis=1, keepdims=True)
    sums = w.sum(axis=0)
    result = SelectionResult(
        system=FPTP,
        criterion_values=sums,
        winners=_winners(sums, matrix.col_labels, HIGHER_BETTER),
        direction=HIGHER_BETTER,
    )
    voting = VotingMatrix(w, TRANSFORM_FPTP, list(matrix.row_labels), list(matrix.col_labels))
    return voting, result


def positional_vote(matrix: AccuracyMatrix) -> tuple[VotingMatrix, SelectionResult]:
    """Positional voting: rank rows, choose the highest median rank."""
    w = np.vstack([_midranks_desc(row) for row in matrix.entries])
    medians = np.median(w, axis=0)
    result = SelectionResult(
        system=POSITIONAL,
        criterion_values=medians,
        winners=_winners(medians, matrix.col_labels, HIGHER_BETTER),
        direction=HIGHER_BETTER,
    )
    voting = VotingMatrix(w, TRANSFORM_POSITIONAL, list(matrix.row_labels), list(matrix.col_labels))
    return voting, result


def scale_rows(matrix: AccuracyMatrix) -> VotingMatrix:
    """Per-row scores a' = 1 - (a - min)/(max - min); constant rows score all 1.

    A constant row cannot discriminate between strategies, and every entry
    of it is a row minimum, so all strategies receive the top score.
    """
    a = matrix.entries
    lo = a.min(axis=1, keepdims=True)
    span = a.max(axis=1, keepdims=True) - lo
    scaled = np.ones_like(a)
    ok = span[:, 0] > 0
    scaled[ok] = 1.0 - (a[ok] - lo[ok]) / span[ok]
    return VotingMatrix(scaled, TRANSFORM_SCALED, list(matrix.row_labels), list(matrix.col_labels))


def _require_scaled(w3: VotingMatrix) -> np.ndarray:
    if w3.transform != TRANSFORM_SCALED:
        raise TypeError(f"expected a scaled voting matrix, got transform {w3.transform!r}")
    return w3.entries


def evaluative_vote(w3: VotingMatrix) -> SelectionResult:
    """Evaluative voting: highest column median of the scaled scores wins."""
    scores = _require_scaled(w3)
    medians = np.median(scores, axis=0)
    return SelectionResult(
        system=EVALUATIVE,
        criterion_values=medians,
        winners=_winners(medians, w3.col_labels, HIGHER_BETTER),
        direction=HIGHER_BETTER,
    )


def ecdf_auc_vote(w3: VotingMatrix) -> SelectionResult:
    """ECDF-AUC voting: smallest area under the column ECDF over [0, 1] wins.

    For values in [0, 1] the area equals 1 - column mean exactly; an all-1
    column has area 0 (best everywhere), an all-0 column area 1.
    """
    scores = _require_scaled(w3)
    if np.any(scores < 0) or np.any(scores > 1):
        raise ValueError("scaled scores must lie in [0, 1]")
    aucs = 1.0 - scores.mean(axis=0)
    return SelectionResult(
        system=ECDF_AUC,
        criterion_values=aucs,
        winners=_winners(aucs, w3.col_labels, LOWER_BETTER),
        direction=LOWER_BETTER,
    )


def ecdf_steps(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Jump points (x, F(x)) of the empirical CDF of a score column."""
    v = np.sort(np.asarray(values, dtype=np.float64).ravel())
    xs, counts = np.unique(v, return_counts=True)
    return xs, np.cumsum(counts) / v.size


def integrate_ecdf(values: np.ndarray, upto: float = 1.0) -> float:
    """Exact integral of the empirical CDF of `values` over [0, upto].

    Closed form for a step function: (1/n) * sum_i max(0, upto - v_i).
    """
    v = np.asarray(values, dtype=np.float64).ravel()
    return float(np.maximum(0.0, upto - v).mean())


def stochastic_dominance(w3: VotingMatrix, order: int = 1) -> np.ndarray:
    """P x P boolean relation: entry [i, j] marks column i dominating column j.

    Higher scores are better. First order: F_i <= F_j everywhere with strict
    inequality somewhere. Second order: the same on the running integrals of
    the ECDFs. The relation is irreflexive and antisymmetric.
    """
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    scores = _require_scaled(w3)
    n_rows, p = scores.shape
    dominates = np.zeros((p, p), dtype=bool)
    grids = {}
    for i in range(p):
        for j in range(p):
            if i == j:
                continue
            key = (min(i, j), max(i, j))
            if key not in grids:
                grids[key] = np.unique(np.concatenate([scores[:, key[0]], scores[:, key[1]], [1.0]]))
            grid = grids[key]
            if order == 1:
                f_i = np.searchsorted(np.sort(scores[:, i]), grid, side="right") / n_rows
                f_j = np.searchsorted(np.sort(scores[:, j]), grid, side="right") / n_rows
            else:
                f_i = np.array([integrate_ecdf(scores[:, i], x) for x in grid])
                f_j = np.array([integrate_ecdf(scores[:, j], x) for x in grid])
            if np.all(f_i <= f_j) and np.any(f_i < f_j):
                dominates[i, j] = True
    return dominates
