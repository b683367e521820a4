import numpy as np
import pytest

from predvote.dataset import StudyFrame
from predvote.errors import FitError
from predvote.models import ModelSpec, fit
from predvote.prediction import (
    Characteristic,
    PredictionStrategy,
    eval_characteristic,
    order_statistic_quantile,
    plug_in_predict,
)


class TestCharacteristic:
    def test_total(self):
        assert eval_characteristic(Characteristic("total"), [1.0, 2.0, 3.0, 4.0]) == 10.0

    def test_mean(self):
        assert eval_characteristic(Characteristic("mean"), [1.0, 2.0, 3.0, 4.0]) == 2.5

    def test_median_midpoint_convention(self):
        assert eval_characteristic(Characteristic("median"), [1.0, 2.0, 3.0, 4.0]) == 2.5
        assert eval_characteristic(Characteristic("median"), [5.0, 1.0, 3.0]) == 3.0

    def test_quantile_order_statistic(self):
        # ceil(0.95 * 100) = 95th order statistic
        values = np.arange(1.0, 101.0)
        np.random.default_rng(0).shuffle(values)
        assert eval_characteristic(Characteristic("quantile", 0.95), values) == 95.0
        # ceil(0.5 * 5) = 3rd order statistic
        assert eval_characteristic(Characteristic("quantile", 0.5), [1.0, 2.0, 3.0, 4.0, 5.0]) == 3.0

    def test_quantile_bruteforce_inf_definition(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            v = rng.standard_normal(rng.integers(1, 40))
            p = rng.uniform(0.01, 0.99)
            candidates = np.sort(v)
            oracle = next(x for x in candidates if np.mean(v <= x) >= p)
            assert order_statistic_quantile(v, p) == oracle

    def test_quantile_monotone_in_p(self):
        rng = np.random.default_rng(1)
        v = rng.standard_normal(37)
        qs = [order_statistic_quantile(v, p) for p in np.linspace(0.01, 0.99, 25)]
        assert np.all(np.diff(qs) >= 0)

    def test_length_mismatch_is_shape_error(self):
        with pytest.raises(ValueError, match="length"):
            eval_characteristic(Characteristic("total"), [1.0, 2.0], expected_length=3)

    def test_validation(self):
        with pytest.raises(ValueError):
            Characteristic("quantile")
        with pytest.raises(ValueError):
            Characteristic("quantile", 1.0)
        with pytest.raises(ValueError):
            Characteristic("total", 0.5)
        with pytest.raises(ValueError):
            Characteristic("mode")
        assert Characteristic("quantile", 0.95).name == "q0.95"

    def test_strategy_validation(self):
        with pytest.raises(ValueError):
            PredictionStrategy("s", ModelSpec("ols_normal"), algorithm="eblup")
        with pytest.raises(ValueError):
            PredictionStrategy("", ModelSpec("ols_normal"))


class TestPlugIn:
    def chars(self):
        return [Characteristic("total"), Characteristic("median"), Characteristic("quantile", 0.9)]

    def test_empty_out_block_reduces_to_sample_evaluation(self):
        rng = np.random.default_rng(0)
        y = rng.uniform(1.0, 5.0, size=12)
        frame = StudyFrame(
            x_sample=rng.standard_normal((12, 1)),
            y_sample=y,
            x_out=np.empty((0, 1)),
            column_names=["x"],
        )
        strategy = PredictionStrategy("ols", ModelSpec("ols_normal"))
        got = plug_in_predict(strategy, frame, y, self.chars())
        want = [eval_characteristic(c, y) for c in self.chars()]
        assert np.allclose(got, want)

    def test_noiseless_linear_total_is_true_total(self, linear_frame):
        strategy = PredictionStrategy("ols", ModelSpec("ols_normal"))
        total = plug_in_predict(strategy, linear_frame, linear_frame.y_sample, [Characteristic("total")])[0]
        x_all = np.vstack([linear_frame.x_sample, linear_frame.x_out])
        assert total == pytest.approx(np.sum(2.0 + 3.0 * x_all[:, 0]), rel=1e-12)

    def test_intercept_only_total_closed_form(self, linear_frame):
        # composite total = sum(y_s) + k * mean(y_s)
        strategy = PredictionStrategy("null", ModelSpec("ols_normal", {"intercept_only": True}))
        y = linear_frame.y_sample
        total = plug_in_predict(strategy, linear_frame, y, [Characteristic("total")])[0]
        assert total == pytest.approx(y.sum() + linear_frame.k * y.mean(), rel=1e-12)

    @pytest.mark.parametrize(
        "spec",
        [
            ModelSpec("ols_normal"),
            ModelSpec("lognormal"),
            ModelSpec("gamma_glm_log_link"),
            ModelSpec("regression_tree", {"max_depth": 3, "min_leaf": 2}),
            ModelSpec("knn", {"k_neighbors": 3}),
        ],
        ids=lambda s: s.family,
    )
    def test_total_equals_independent_summation(self, positive_frame, spec):
        strategy = PredictionStrategy("s", spec)
        total = plug_in_predict(strategy, positive_frame, positive_frame.y_sample, [Characteristic("total")])[0]
        model = fit(spec, positive_frame.x_sample, positive_frame.y_sample)
        independent = positive_frame.y_sample.sum() + model.predict(positive_frame.x_out).sum()
        assert total == pytest.approx(independent, rel=1e-12)

    def test_composite_quantiles_monotone(self, positive_frame):
        strategy = PredictionStrategy("knn", ModelSpec("knn", {"k_neighbors": 4}))
        orders = [0.1, 0.3, 0.5, 0.7, 0.9]
        chars = [Characteristic("quantile", p) for p in orders]
        values = plug_in_predict(strategy, positive_frame, positive_frame.y_sample, chars)
        assert np.all(np.diff(values) >= 0)

    def test_y_s_never_mutated(self, positive_frame):
        y = positive_frame.y_sample.copy()
        y.setflags(write=True)
        snapshot = y.copy()
        plug_in_predict(PredictionStrategy("ols", ModelSpec("ols_normal")), positive_frame, y, self.chars())
        assert np.array_equal(y, snapshot)

    def test_fit_failure_carries_strategy_name(self, positive_frame):
        y = positive_frame.y_sample.copy()
        y.setflags(write=True)
        y[0] = -1.0
        strategy = PredictionStrategy("my_lognormal", ModelSpec("lognormal"))
        with pytest.raises(FitError, match="my_lognormal"):
            plug_in_predict(strategy, positive_frame, y, self.chars())

    def test_wrong_sample_length_rejected(self, positive_frame):
        with pytest.raises(ValueError, match="length"):
            plug_in_predict(
                PredictionStrategy("ols", ModelSpec("ols_normal")),
                positive_frame,
                np.ones(positive_frame.n + 1),
                self.chars(),
            )
