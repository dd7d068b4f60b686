import itertools

import numpy as np
import pytest

from cliquecast.learn import (
    BoostConfig,
    DecisionTreeModel,
    GradientBoostModel,
    TreeConfig,
    balanced_class_weights,
    classification_metrics,
    export_tree,
    fit_decision_tree,
    fit_gradient_boost,
    model_from_json,
    model_to_json,
    permutation_importance,
    predict_class,
    predict_class_batch,
    predict_regression,
    predict_regression_batch,
    rmse,
)


def exhaustive_best_split(x, y, w, w_total):
    """Independent split oracle: scan every (feature, midpoint threshold)."""
    def gini(mask):
        ww = w[mask]
        if ww.sum() == 0:
            return 0.0
        p1 = ww[y[mask] == 1].sum() / ww.sum()
        return 1 - p1**2 - (1 - p1) ** 2

    node_w = w.sum()
    node_imp = gini(np.ones(len(y), dtype=bool))
    best = None
    for f in range(x.shape[1]):
        values = sorted(set(x[:, f]))
        for lo, hi in zip(values, values[1:]):
            thr = (lo + hi) / 2
            left = x[:, f] <= thr
            wl, wr = w[left].sum(), w[~left].sum()
            dec = (node_w / w_total) * (
                node_imp - wl / node_w * gini(left) - (wr / node_w) * gini(~left)
            )
            if best is None or dec > best[0] + 1e-15:
                best = (dec, f, thr)
    return best


class TestBalancedWeights:
    def test_ninety_ten(self):
        y = [0] * 90 + [1] * 10
        w = balanced_class_weights(y)
        assert w[0] == pytest.approx(100 / 180)
        assert w[0] == pytest.approx(0.5556, abs=1e-4)
        assert w[1] == pytest.approx(5.0)

    def test_balanced_is_identity(self):
        assert balanced_class_weights([0] * 50 + [1] * 50) == {0: 1.0, 1: 1.0}

    def test_ratio_tracks_inverse_prevalence(self):
        y = [0] * 89 + [1] * 11
        w = balanced_class_weights(y)
        assert w[1] / w[0] == pytest.approx(89 / 11)
        assert w[1] / w[0] == pytest.approx(8.09, abs=0.01)

    def test_single_class_fails(self):
        with pytest.raises(ValueError):
            balanced_class_weights([1, 1, 1])


class TestDecisionTree:
    def test_separable_1d(self):
        x = np.array([[1.0], [2.0], [4.0], [5.0]])
        y = (x[:, 0] > 3).astype(int)
        model = fit_decision_tree(x, y, TreeConfig(), ["f0"])
        assert model.root.threshold == pytest.approx(3.0)
        assert model.root.left.is_leaf and model.root.right.is_leaf
        assert list(predict_class_batch(model, x)) == list(y)

    def test_depth_bound(self):
        rng = np.random.Generator(np.random.PCG64(0))
        x = rng.normal(size=(300, 5))
        y = (x[:, 0] + x[:, 1] * x[:, 2] > 0).astype(int)
        model = fit_decision_tree(x, y, TreeConfig(max_depth=5), [f"f{i}" for i in range(5)])
        assert model.root.depth() <= 5

    @pytest.mark.parametrize("seed", range(10))
    def test_split_matches_exhaustive_oracle(self, seed):
        rng = np.random.Generator(np.random.PCG64(seed))
        n = int(rng.integers(4, 9))
        x = np.round(rng.normal(size=(n, 2)), 2)
        y = rng.integers(0, 2, size=n)
        if len(set(y)) < 2:
            y[0] = 1 - y[0]
        cfg = TreeConfig(max_depth=1, min_impurity_decrease=0.0, class_weight="balanced")
        model = fit_decision_tree(x, y, cfg, ["f0", "f1"])
        w = np.array([balanced_class_weights(y)[c] for c in y])
        oracle = exhaustive_best_split(x, y, w, w.sum())
        if model.root.is_leaf:
            assert oracle is None or oracle[0] <= 0.0
        else:
            assert model.root.feature == oracle[1]
            assert model.root.threshold == pytest.approx(oracle[2])

    def test_impurity_decrease_threshold_respected(self):
        rng = np.random.Generator(np.random.PCG64(1))
        x = rng.normal(size=(400, 6))
        y = (x[:, 0] > 0.2).astype(int)
        cfg = TreeConfig(max_depth=5, min_impurity_decrease=0.005)
        model = fit_decision_tree(x, y, cfg, [f"f{i}" for i in range(6)])
        w = np.array([balanced_class_weights(y)[c] for c in y])
        w_total = w.sum()

        def check(node, idx):
            if node.is_leaf:
                return
            mask = x[idx, node.feature] <= node.threshold
            oracle = exhaustive_best_split(x[idx], y[idx], w[idx], w_total)
            assert oracle[0] >= 0.005
            check(node.left, idx[mask])
            check(node.right, idx[~mask])

        check(model.root, np.arange(len(y)))

    def test_threshold_between_observed_values(self):
        rng = np.random.Generator(np.random.PCG64(3))
        x = rng.normal(size=(100, 3))
        y = (x[:, 1] > 0).astype(int)
        model = fit_decision_tree(x, y, TreeConfig(), ["a", "b", "c"])

        def check(node, idx):
            if node.is_leaf:
                return
            col = x[idx, node.feature]
            assert col.min() < node.threshold < col.max()
            mask = col <= node.threshold
            check(node.left, idx[mask])
            check(node.right, idx[~mask])

        check(model.root, np.arange(len(y)))

    def test_fit_determinism(self):
        rng = np.random.Generator(np.random.PCG64(4))
        x = rng.normal(size=(200, 4))
        y = (x[:, 0] * x[:, 1] > 0).astype(int)
        names = [f"f{i}" for i in range(4)]
        a = model_to_json(fit_decision_tree(x, y, TreeConfig(), names))
        b = model_to_json(fit_decision_tree(x, y, TreeConfig(), names))
        assert a == b

    def test_balanced_equals_duplicated_unweighted(self):
        # duplicating the minority class to parity makes the unweighted tree
        # agree with the balanced-weighted tree on the original data
        x = np.array([[1.0], [2.0], [3.0], [7.0], [8.0], [9.0], [10.0], [11.0]])
        y = np.array([0, 0, 0, 0, 0, 0, 1, 1])
        balanced = fit_decision_tree(x, y, TreeConfig(max_depth=2), ["f"])
        reps = np.where(y == 1, 3, 1)
        x_dup = np.repeat(x, reps, axis=0)
        y_dup = np.repeat(y, reps)
        unweighted = fit_decision_tree(
            x_dup, y_dup, TreeConfig(max_depth=2, class_weight=None), ["f"]
        )
        assert balanced.root.feature == unweighted.root.feature
        assert balanced.root.threshold == pytest.approx(unweighted.root.threshold)


class TestPredictClass:
    def test_equal_threshold_goes_left(self):
        x = np.array([[1.0], [2.0], [4.0], [5.0]])
        y = np.array([0, 0, 1, 1])
        model = fit_decision_tree(x, y, TreeConfig(), ["f0"])
        thr = model.root.threshold
        left_class = 1 if model.root.left.class_mass[1] > model.root.left.class_mass[0] else 0
        assert predict_class(model, [thr])[0] == left_class

    def test_single_leaf_majority(self):
        root_x = np.array([[1.0], [1.0], [1.0]])
        y = np.array([0, 0, 1])
        model = fit_decision_tree(root_x, y, TreeConfig(class_weight=None), ["f0"])
        assert model.root.is_leaf
        cls, conf = predict_class(model, [42.0])
        assert cls == 0
        assert conf == pytest.approx(2 / 3)

    def test_missing_feature_key_fails(self):
        x = np.array([[1.0], [5.0]])
        model = fit_decision_tree(x, np.array([0, 1]), TreeConfig(), ["f0"])
        with pytest.raises(KeyError):
            predict_class(model, {"other": 1.0})


class TestExportTree:
    def _model(self):
        x = np.array([[1.0, 0.0], [2.0, 1.0], [4.0, 0.0], [5.0, 1.0]])
        y = np.array([0, 0, 1, 1])
        return fit_decision_tree(x, y, TreeConfig(), ["alpha", "beta"])

    def test_text_render(self):
        text = export_tree(self._model(), "text")
        assert "alpha <= 3" in text
        assert "[T]" in text and "[F]" in text

    def test_dot_render_colors(self):
        dot = export_tree(self._model(), "dot")
        assert "palegreen" in dot and "lightcoral" in dot and "lightblue" in dot

    def test_deterministic(self):
        m = self._model()
        assert export_tree(m, "dot") == export_tree(m, "dot")

    def test_unknown_format(self):
        with pytest.raises(ValueError):
            export_tree(self._model(), "svg")


class TestGradientBoost:
    def test_constant_targets(self):
        x = np.arange(10, dtype=float).reshape(-1, 1)
        y = np.full(10, 3.5)
        model = fit_gradient_boost(x, y, BoostConfig(n_stages=5), ["f0"])
        pred = predict_regression_batch(model, x)
        assert rmse(y, pred) == pytest.approx(0.0, abs=1e-12)

    def test_step_function_learned(self):
        x = np.linspace(0, 1, 64).reshape(-1, 1)
        y = (x[:, 0] > 0.5).astype(float) * 4.0
        model = fit_gradient_boost(x, y, BoostConfig(n_stages=200), ["f0"])
        assert rmse(y, predict_regression_batch(model, x)) < 1e-3

    def test_training_rmse_non_increasing(self):
        rng = np.random.Generator(np.random.PCG64(8))
        x = rng.normal(size=(150, 4))
        y = x[:, 0] * 2 + np.sin(x[:, 1]) + rng.normal(scale=0.1, size=150)
        errors = []
        for stages in (1, 10, 50, 200):
            model = fit_gradient_boost(x, y, BoostConfig(n_stages=stages),
                                       [f"f{i}" for i in range(4)])
            errors.append(rmse(y, predict_regression_batch(model, x)))
        assert all(a >= b - 1e-12 for a, b in zip(errors, errors[1:]))

    def test_stage_trees_respect_depth(self):
        rng = np.random.Generator(np.random.PCG64(9))
        x = rng.normal(size=(80, 3))
        y = x[:, 0] ** 2
        model = fit_gradient_boost(x, y, BoostConfig(n_stages=10, max_depth=3),
                                   ["a", "b", "c"])
        assert all(t.depth() <= 3 for t in model.trees)

    def test_zero_stage_model_predicts_mean(self):
        model = GradientBoostModel(4.25, BoostConfig(), ("f0",))
        assert predict_regression(model, [1.0]) == 4.25

    def test_constant_trained_model_predicts_constant(self):
        x = np.arange(6, dtype=float).reshape(-1, 1)
        model = fit_gradient_boost(x, np.full(6, -2.0), BoostConfig(n_stages=3), ["f0"])
        assert predict_regression(model, [99.0]) == pytest.approx(-2.0)

    def test_beats_constant_predictor_on_linear_target(self):
        rng = np.random.Generator(np.random.PCG64(10))
        x_train = rng.uniform(-1, 1, size=(200, 1))
        x_test = rng.uniform(-1, 1, size=(50, 1))
        y_train, y_test = 3 * x_train[:, 0], 3 * x_test[:, 0]
        model = fit_gradient_boost(x_train, y_train, BoostConfig(), ["f0"])
        assert rmse(y_test, predict_regression_batch(model, x_test)) < np.std(y_test)


class TestMetrics:
    def test_fixed_regime_confusion_matrix(self):
        truth = [0] * 4112 + [1] * 594
        pred = [0] * 3458 + [1] * 654 + [0] * 97 + [1] * 497
        report = classification_metrics(truth, pred)
        assert report.matrix == ((3458, 654), (97, 497))
        assert report.recall_solvable == pytest.approx(0.8367, abs=5e-4)
        assert report.recall_not_solvable == pytest.approx(0.8410, abs=5e-4)

    def test_random_regime_confusion_matrix(self):
        truth = [0] * 4403 + [1] * 493
        pred = [0] * 3731 + [1] * 672 + [0] * 68 + [1] * 425
        report = classification_metrics(truth, pred)
        assert report.matrix == ((3731, 672), (68, 425))
        assert report.recall_solvable == pytest.approx(0.8621, abs=5e-4)
        assert report.recall_not_solvable == pytest.approx(0.8474, abs=5e-4)

    def test_perfect_predictions(self):
        report = classification_metrics([0, 1, 0, 1], [0, 1, 0, 1])
        assert report.balanced_accuracy == 1.0

    def test_all_one_class_predictor(self):
        report = classification_metrics([0, 0, 1, 1], [1, 1, 1, 1])
        assert report.balanced_accuracy == 0.5

    def test_rmse_values(self):
        assert rmse([1, 2, 3], [1, 2, 3]) == 0.0
        assert rmse([0, 0], [1, 1]) == 1.0
        assert rmse([0, 0, 0, 0], [1, 0, 0, 0]) == 0.5

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            rmse([1, 2], [1])
        with pytest.raises(ValueError):
            classification_metrics([1, 0], [1])


class TestPermutationImportance:
    def test_target_feature_is_important(self):
        y = np.array([0, 0, 0, 0, 1, 1, 1, 1] * 10)
        x = np.column_stack([y.astype(float), np.zeros(len(y))])
        model = fit_decision_tree(x, y, TreeConfig(), ["signal", "junk"])
        imp = permutation_importance(model, x, y, "balanced_accuracy", repeats=3, seed=0)
        assert imp["signal"] > 0

    def test_unused_feature_scores_zero(self):
        rng = np.random.Generator(np.random.PCG64(12))
        y = np.array([0, 1] * 40)
        x = np.column_stack([y.astype(float), rng.normal(size=len(y))])
        model = fit_decision_tree(x, y, TreeConfig(), ["signal", "noise"])
        imp = permutation_importance(model, x, y, "balanced_accuracy", repeats=5, seed=1)
        assert imp["noise"] == 0.0

    def test_duplicate_feature_unused_copy_scores_zero(self):
        y = np.array([0, 0, 1, 1] * 15)
        col = y.astype(float)
        x = np.column_stack([col, col])  # identical informative columns
        model = fit_decision_tree(x, y, TreeConfig(), ["first", "copy"])
        imp = permutation_importance(model, x, y, "balanced_accuracy", repeats=4, seed=2)
        # tie-break picks the lower feature index; the copy is never read
        assert imp["first"] > 0
        assert imp["copy"] == 0.0

    def test_rmse_orientation(self):
        x = np.linspace(0, 1, 50).reshape(-1, 1)
        y = 2 * x[:, 0]
        model = fit_gradient_boost(x, y, BoostConfig(n_stages=50), ["f0"])
        imp = permutation_importance(model, x, y, "rmse", repeats=3, seed=3)
        assert imp["f0"] > 0


class TestSerialization:
    def test_tree_round_trip(self):
        rng = np.random.Generator(np.random.PCG64(13))
        x = rng.normal(size=(60, 3))
        y = (x[:, 2] > 0).astype(int)
        model = fit_decision_tree(x, y, TreeConfig(), ["a", "b", "c"])
        loaded = model_from_json(model_to_json(model))
        assert isinstance(loaded, DecisionTreeModel)
        assert model_to_json(loaded) == model_to_json(model)
        np.testing.assert_array_equal(
            predict_class_batch(loaded, x), predict_class_batch(model, x)
        )

    def test_boost_round_trip(self):
        x = np.linspace(0, 1, 30).reshape(-1, 1)
        y = x[:, 0] ** 2
        model = fit_gradient_boost(x, y, BoostConfig(n_stages=20), ["f0"])
        loaded = model_from_json(model_to_json(model))
        np.testing.assert_allclose(
            predict_regression_batch(loaded, x), predict_regression_batch(model, x)
        )
