"""k-fold cross-validation, MAE scoring, and model serialization."""

from __future__ import annotations

import numpy as np
import pytest

from equarent.models import (
    CvReport,
    TrainerError,
    cross_validate,
    fit_constant,
    fit_forest,
    fit_linear,
    fit_median,
    fit_mlp,
    fit_tree,
    kfold_split,
    mae,
    model_digest,
    model_from_dict,
    model_to_dict,
)


class TestMae:
    def test_known_value(self):
        assert mae(np.array([0.1, 0.5]), np.array([0.2, 0.3])) == pytest.approx(0.15)

    def test_validates_shapes(self):
        with pytest.raises(ValueError):
            mae(np.zeros(3), np.zeros(4))
        with pytest.raises(ValueError):
            mae(np.zeros(0), np.zeros(0))


class TestKfoldSplit:
    def test_557_rows_into_10_folds(self):
        # [DERIVED] 557 = 7 folds of 56 + 3 folds of 55.
        folds = kfold_split(557, 10, seed=0)
        sizes = sorted(len(test) for _, test in folds)
        assert sizes == [55, 55, 55] + [56] * 7
        # Big folds come first (remainder spread over the leading folds).
        assert [len(t) for _, t in folds[:7]] == [56] * 7

    def test_folds_partition_the_rows(self):
        folds = kfold_split(101, 7, seed=3)
        all_test = np.concatenate([test for _, test in folds])
        assert sorted(all_test.tolist()) == list(range(101))
        for train, test in folds:
            assert len(np.intersect1d(train, test)) == 0
            assert len(train) + len(test) == 101

    def test_seeded_shuffle(self):
        a = kfold_split(50, 5, seed=1)
        b = kfold_split(50, 5, seed=1)
        c = kfold_split(50, 5, seed=2)
        assert all(np.array_equal(x[1], y[1]) for x, y in zip(a, b))
        assert any(not np.array_equal(x[1], y[1]) for x, y in zip(a, c))

    def test_bounds_checked(self):
        with pytest.raises(ValueError):
            kfold_split(5, 1, seed=0)
        with pytest.raises(ValueError):
            kfold_split(5, 6, seed=0)


class TestCrossValidate:
    def test_report_shape_and_mean(self, matrix120):
        X, y = matrix120
        report = cross_validate(lambda X_, y_: fit_constant(y_), X, y,
                                k=5, seed=2, model_id="constant")
        assert report.model_id == "constant"
        assert report.k == 5 and report.seed == 2
        assert len(report.fold_maes) == 5
        assert report.mean_mae == pytest.approx(np.mean(report.fold_maes))

    def test_forest_generalizes_better_than_constant(self, matrix120):
        X, y = matrix120
        forest = cross_validate(
            lambda X_, y_: fit_forest(X_, y_, n_trees=20, seed=0), X, y,
            k=5, seed=0, model_id="forest")
        constant = cross_validate(lambda X_, y_: fit_constant(y_), X, y,
                                  k=5, seed=0, model_id="constant")
        assert forest.mean_mae < constant.mean_mae

    def test_trainer_failure_names_the_fold(self, matrix120):
        X, y = matrix120

        def broken(X_, y_):
            raise RuntimeError("boom")

        with pytest.raises(TrainerError, match="fold 0"):
            cross_validate(broken, X, y, k=5, model_id="broken")

    def test_report_roundtrip(self):
        report = CvReport(model_id="m", k=3, seed=1, fold_maes=(0.1, 0.2, 0.3))
        assert CvReport.from_dict(report.to_dict()) == report

    def test_too_few_rows_rejected(self):
        with pytest.raises(ValueError, match="cannot be split"):
            cross_validate(lambda X_, y_: fit_constant(y_),
                           np.zeros((3, 2)), np.full(3, 0.5), k=5)


class TestModelSerialization:
    def all_models(self, matrix120, rng):
        X, y = matrix120
        Xs, ys = X[:60, :6], y[:60]
        return [
            fit_constant(y),
            fit_median(y),
            fit_linear(Xs, ys),
            fit_tree(Xs, ys, min_samples_split=10),
            fit_forest(Xs, ys, n_trees=4, seed=0),
            fit_mlp(Xs, ys, hidden=(6,), epochs=5, seed=0),
        ]

    def test_roundtrip_preserves_predictions_exactly(self, matrix120, rng):
        X, _ = matrix120
        Xq = X[:20, :6]  # every model above was fit on 6 columns
        for model in self.all_models(matrix120, rng):
            back = model_from_dict(model_to_dict(model))
            assert np.array_equal(back.predict(Xq), model.predict(Xq))

    def test_digest_identifies_content(self, matrix120, rng):
        models = self.all_models(matrix120, rng)
        digests = [model_digest(m) for m in models]
        assert len(set(digests)) == len(digests)  # all distinct
        # Same fit, same digest.
        X, y = matrix120
        assert model_digest(fit_forest(X[:60, :6], y[:60], n_trees=4, seed=0)) == \
            model_digest(fit_forest(X[:60, :6], y[:60], n_trees=4, seed=0))

    def test_kind_tags(self, matrix120, rng):
        kinds = [model_to_dict(m)["kind"] for m in self.all_models(matrix120, rng)]
        assert kinds == ["constant", "constant", "linear", "tree", "forest", "mlp"]

    def test_unknown_inputs_rejected(self):
        with pytest.raises(TypeError):
            model_to_dict(object())
        with pytest.raises(ValueError, match="unknown model kind"):
            model_from_dict({"kind": "quantum"})
