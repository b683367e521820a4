import math

import numpy as np
import pytest

from predvote.accuracy import (
    AccuracyMatrix,
    ErrorTensor,
    Measure,
    build_accuracy_matrix,
    qape,
    rmse,
)
from predvote.errors import DataError


class TestRmse:
    def test_zero_errors(self):
        assert rmse([0.0, 0.0, 0.0]) == 0.0

    def test_hand_value(self):
        assert rmse([3.0, -4.0]) == pytest.approx(math.sqrt((9 + 16) / 2))

    def test_constant_error_is_magnitude(self):
        assert rmse([-2.5] * 7) == pytest.approx(2.5)

    def test_empty_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            rmse([])

    def test_jensen_bound_against_mean_abs(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            e = rng.standard_normal(rng.integers(1, 50))
            assert rmse(e) >= np.mean(np.abs(e)) - 1e-12


class TestQape:
    def test_median_of_five(self):
        # ceil(0.5 * 5) = 3rd order statistic of |errors|
        assert qape([1.0, -2.0, 3.0, -4.0, 5.0], 0.5) == 3.0

    def test_p95_of_hundred(self):
        values = np.arange(1.0, 101.0)
        np.random.default_rng(1).shuffle(values)
        assert qape(values, 0.95) == 95.0

    def test_singleton(self):
        assert qape([-7.0], 0.5) == 7.0

    def test_bruteforce_inf_definition(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            e = rng.standard_normal(rng.integers(1, 60))
            p = rng.uniform(0.01, 0.99)
            abs_sorted = np.sort(np.abs(e))
            oracle = next(x for x in abs_sorted if np.mean(np.abs(e) <= x) >= p)
            assert qape(e, p) == oracle

    def test_monotone_in_p(self):
        rng = np.random.default_rng(3)
        e = rng.standard_normal(41)
        values = [qape(e, p) for p in np.linspace(0.05, 0.95, 19)]
        assert np.all(np.diff(values) >= 0)

    def test_validation(self):
        with pytest.raises(ValueError):
            qape([], 0.5)
        with pytest.raises(ValueError):
            qape([1.0], 0.0)
        with pytest.raises(ValueError):
            qape([1.0], 1.0)


class TestMeasure:
    def test_labels(self):
        assert Measure("rmse").label == "rmse"
        assert Measure("qape", 0.5).label == "qape0.5"
        assert Measure("qape", 0.95).label == "qape0.95"

    def test_validation(self):
        with pytest.raises(ValueError):
            Measure("mae")
        with pytest.raises(ValueError):
            Measure("qape")
        with pytest.raises(ValueError):
            Measure("rmse", 0.5)


def tensor_from(values, mask=None):
    values = np.asarray(values, dtype=float)
    if mask is None:
        mask = np.zeros((values.shape[0], values.shape[1], values.shape[3]), dtype=bool)
    return ErrorTensor(values=values, failure_mask=np.asarray(mask, dtype=bool))


class TestBuildAccuracyMatrix:
    def test_hand_example(self):
        # G=1, C=1, B=3, P=2: errors (1,1,1) and (0,0,3)
        values = np.zeros((1, 3, 1, 2))
        values[0, :, 0, 0] = [1.0, 1.0, 1.0]
        values[0, :, 0, 1] = [0.0, 0.0, 3.0]
        matrix = build_accuracy_matrix(tensor_from(values), [Measure("rmse")])
        assert np.allclose(matrix.entries, [[1.0, math.sqrt(3.0)]])

    def test_dimension_product(self):
        rng = np.random.default_rng(0)
        values = rng.standard_normal((2, 5, 2, 3))
        matrix = build_accuracy_matrix(
            tensor_from(values), [Measure("rmse"), Measure("qape", 0.5), Measure("qape", 0.95)]
        )
        assert matrix.shape == (12, 3)

    def test_case_study_dimensions(self):
        # G=6, C=2, M=3 gives S=36 rows; P=6 columns
        rng = np.random.default_rng(1)
        values = rng.standard_normal((6, 8, 2, 6))
        matrix = build_accuracy_matrix(
            tensor_from(values), [Measure("rmse"), Measure("qape", 0.5), Measure("qape", 0.95)]
        )
        assert matrix.shape == (36, 6)

    def test_row_order_measure_major_then_characteristic_then_generator(self):
        rng = np.random.default_rng(2)
        values = rng.standard_normal((2, 4, 2, 2))
        matrix = build_accuracy_matrix(
            tensor_from(values),
            [Measure("rmse"), Measure("qape", 0.5)],
            generator_labels=["gA", "gB"],
            characteristic_labels=["cA", "cB"],
            strategy_names=["p1", "p2"],
        )
        assert matrix.row_labels == [
            ("gA", "cA", "rmse"),
            ("gB", "cA", "rmse"),
            ("gA", "cB", "rmse"),
            ("gB", "cB", "rmse"),
            ("gA", "cA", "qape0.5"),
            ("gB", "cA", "qape0.5"),
            ("gA", "cB", "qape0.5"),
            ("gB", "cB", "qape0.5"),
        ]

    def test_iteration_permutation_invariance(self):
        rng = np.random.default_rng(3)
        values = rng.standard_normal((2, 30, 2, 3))
        measures = [Measure("rmse"), Measure("qape", 0.7)]
        base = build_accuracy_matrix(tensor_from(values), measures)
        perm = rng.permutation(30)
        shuffled = build_accuracy_matrix(tensor_from(values[:, perm]), measures)
        assert np.allclose(base.entries, shuffled.entries)

    def test_scaling_errors_scales_entries(self):
        rng = np.random.default_rng(4)
        values = rng.standard_normal((1, 20, 1, 2))
        measures = [Measure("rmse"), Measure("qape", 0.5)]
        base = build_accuracy_matrix(tensor_from(values), measures)
        scaled = build_accuracy_matrix(tensor_from(3.5 * values), measures)
        assert np.allclose(scaled.entries, 3.5 * base.entries)

    def test_masked_iterations_excluded(self):
        values = np.zeros((1, 4, 1, 2))
        values[0, :, 0, 0] = [1.0, 100.0, 1.0, 1.0]
        values[0, :, 0, 1] = [2.0, 2.0, 2.0, 2.0]
        mask = np.zeros((1, 4, 2), dtype=bool)
        mask[0, 1, 0] = True  # drop the 100.0 for strategy 1 only
        matrix = build_accuracy_matrix(tensor_from(values, mask), [Measure("rmse")])
        assert np.allclose(matrix.entries, [[1.0, 2.0]])

    def test_too_few_survivors_is_assembly_error(self):
        values = np.zeros((1, 3, 1, 2))
        mask = np.zeros((1, 3, 2), dtype=bool)
        mask[0, :2, 1] = True
        with pytest.raises(DataError, match=r"strategy 'p2'"):
            build_accuracy_matrix(
                tensor_from(values, mask), [Measure("rmse")], strategy_names=["p1", "p2"]
            )

    def test_entries_nonnegative_enforced(self):
        with pytest.raises(DataError, match="nonnegative"):
            AccuracyMatrix(entries=[[1.0, -0.5]], row_labels=["r"], col_labels=["a", "b"])

    def test_effective_iterations(self):
        mask = np.zeros((1, 5, 2), dtype=bool)
        mask[0, :3, 1] = True
        tensor = tensor_from(np.zeros((1, 5, 1, 2)), mask)
        assert tensor.effective_iterations().tolist() == [[5, 2]]

    def test_masked_nonfinite_entries_tolerated(self):
        values = np.zeros((1, 2, 1, 2))
        values[0, 0, 0, 1] = np.nan
        mask = np.zeros((1, 2, 2), dtype=bool)
        mask[0, 0, 1] = True
        tensor_from(values, mask)  # must not raise
        with pytest.raises(ValueError, match="finite"):
            tensor_from(values)  # unmasked NaN must raise
