"""Interventional Shapley attributions: exactness, axioms, cross-checks."""

from __future__ import annotations

import numpy as np
import pytest

from equarent.casegen import encode
from equarent.explain import (
    BRUTE_FORCE_MAX_DIM,
    BackgroundSet,
    Explanation,
    aggregate_contributions,
    brute_force_shap,
    forest_column_phi,
    tree_shap,
)
from equarent.models import fit_forest
from oracles import permutation_shapley


@pytest.fixture(scope="module")
def small_forest():
    rng = np.random.default_rng(17)
    X = np.ascontiguousarray(rng.uniform(size=(160, 6)))
    y = (0.5 * (X[:, 0] > 0.4) + 0.3 * (X[:, 2] > 0.6)
         + 0.2 * X[:, 4] + rng.normal(0, 0.02, 160))
    forest = fit_forest(X, np.clip(y, 0, 1), n_trees=12, min_samples_split=8,
                        seed=5)
    return forest, X


class TestBackgroundSet:
    def test_small_input_keeps_every_row(self, rng):
        X = rng.normal(size=(10, 3))
        bg = BackgroundSet.sample(X, size=64, seed=0)
        assert np.array_equal(bg.X, X)
        assert bg.size == 10

    def test_large_input_subsamples_without_replacement(self, rng):
        X = rng.normal(size=(500, 3))
        bg = BackgroundSet.sample(X, size=64, seed=4)
        assert bg.size == 64
        # Every row is one of the originals, no duplicates.
        matches = [np.flatnonzero((X == row).all(axis=1))[0] for row in bg.X]
        assert len(set(matches)) == 64
        assert matches == sorted(matches)  # row order preserved
        again = BackgroundSet.sample(X, size=64, seed=4)
        assert np.array_equal(bg.X, again.X)
        other = BackgroundSet.sample(X, size=64, seed=5)
        assert not np.array_equal(bg.X, other.X)

    def test_roundtrip_and_validation(self, rng):
        bg = BackgroundSet.sample(rng.normal(size=(20, 4)), size=8, seed=1)
        back = BackgroundSet.from_dict(bg.to_dict())
        assert np.array_equal(back.X, bg.X) and back.seed == bg.seed
        with pytest.raises(ValueError, match="nonempty"):
            BackgroundSet(X=np.zeros((0, 3)))


class TestTreeShapExactness:
    def test_additivity_base_plus_phi_equals_prediction(self, small_forest):
        # [DERIVED] base + sum(phi) == f(x) to float accuracy (<= 1e-12;
        # the averaging mirrors forest.predict exactly).
        forest, X = small_forest
        bg = BackgroundSet.sample(X, size=32, seed=0)
        for x in X[40:60]:
            e = tree_shap(forest, x, bg)
            assert e.additivity_gap <= 1e-12
            assert e.prediction == forest.predict(x[None, :])[0]

    def test_base_value_is_mean_background_prediction(self, small_forest):
        forest, X = small_forest
        bg = BackgroundSet.sample(X, size=16, seed=2)
        e = tree_shap(forest, X[0], bg)
        assert e.base_value == pytest.approx(
            float(np.mean(forest.predict(bg.X))), abs=1e-12)

    def test_matches_brute_force_enumeration(self, small_forest):
        # [DERIVED] the polynomial walk equals full subset enumeration.
        forest, X = small_forest
        bg = BackgroundSet.sample(X, size=12, seed=1)
        for x in X[10:16]:
            fast = tree_shap(forest, x, bg)
            slow = brute_force_shap(forest.predict, x, bg)
            assert np.max(np.abs(fast.column_phi - slow.column_phi)) <= 1e-10
            assert fast.base_value == pytest.approx(slow.base_value, abs=1e-12)

    def test_matches_permutation_oracle(self):
        # [DERIVED] third independent implementation (all d! orderings).
        rng = np.random.default_rng(23)
        X = np.ascontiguousarray(rng.uniform(size=(80, 4)))
        y = np.where(X[:, 1] > 0.5, 0.75, 0.25) + np.where(X[:, 3] > 0.3, 0.125, 0.0)
        forest = fit_forest(X, y, n_trees=5, min_samples_split=6, seed=0)
        bg = BackgroundSet(X=X[:6])
        for x in X[30:34]:
            fast = tree_shap(forest, x, bg)
            want = permutation_shapley(forest.predict, x, bg.X)
            assert fast.column_phi == pytest.approx(want, abs=1e-10)

    def test_forest_phi_is_mean_of_tree_phi(self, small_forest):
        # [DERIVED] linearity: explaining the mean = mean of explanations.
        forest, X = small_forest
        bg = BackgroundSet.sample(X, size=10, seed=3)
        x = X[7]
        whole = forest_column_phi(forest, x, bg)
        single_trees = [
            forest_column_phi(type(forest)(trees=(t,), seed=0,
                                           min_samples_split=forest.min_samples_split,
                                           bootstrap=False), x, bg)
            for t in forest.trees
        ]
        assert np.allclose(whole, np.mean(single_trees, axis=0), atol=1e-15)

    def test_dummy_feature_exactly_zero(self):
        # [DERIVED] a column no tree splits on gets phi == 0.0, not just small.
        rng = np.random.default_rng(9)
        X = np.ascontiguousarray(rng.uniform(size=(120, 5)))
        y = np.where(X[:, 0] > 0.5, 0.8, 0.2)  # only column 0 matters
        forest = fit_forest(X, y, n_trees=8, min_samples_split=4, seed=1)
        assert forest.features_used() == {0}
        bg = BackgroundSet.sample(X, size=24, seed=0)
        e = tree_shap(forest, X[3], bg)
        assert e.column_phi[1:].tolist() == [0.0, 0.0, 0.0, 0.0]

    def test_dimension_checks(self, small_forest):
        forest, X = small_forest
        bg = BackgroundSet.sample(X, size=8, seed=0)
        with pytest.raises(ValueError, match="instance has"):
            tree_shap(forest, X[0][:4], bg)
        with pytest.raises(ValueError, match="background has"):
            tree_shap(forest, X[0], BackgroundSet(X=X[:5, :4]))


class TestBruteForce:
    def test_against_permutation_oracle_on_generic_function(self):
        # [DERIVED] validates the enumerator itself, independent of trees.
        rng = np.random.default_rng(31)
        d = 4
        M = rng.normal(size=(d, d))

        def predict(Xq):
            Xq = np.atleast_2d(Xq)
            return np.sin(Xq @ M[:, 0]) + 0.5 * (Xq @ M[:, 1]) ** 2

        x = rng.normal(size=d)
        bg = BackgroundSet(X=rng.normal(size=(5, d)))
        got = brute_force_shap(predict, x, bg)
        want = permutation_shapley(predict, x, bg.X)
        assert got.column_phi == pytest.approx(want, abs=1e-10)
        assert got.additivity_gap <= 1e-10

    def test_base_is_mean_background_prediction(self, rng):
        def predict(Xq):
            return np.atleast_2d(Xq).sum(axis=1)

        bg = BackgroundSet(X=rng.normal(size=(7, 3)))
        e = brute_force_shap(predict, np.zeros(3), bg)
        assert e.base_value == pytest.approx(predict(bg.X).mean(), abs=1e-12)

    def test_linear_function_has_closed_form(self, rng):
        # [DERIVED] for f(x) = w.x, phi_i = w_i (x_i - mean z_i).
        w = np.array([2.0, -1.0, 0.5])

        def predict(Xq):
            return np.atleast_2d(Xq) @ w

        bg = BackgroundSet(X=rng.normal(size=(9, 3)))
        x = rng.normal(size=3)
        e = brute_force_shap(predict, x, bg)
        want = w * (x - bg.X.mean(axis=0))
        assert e.column_phi == pytest.approx(want, abs=1e-12)

    def test_dimension_cap(self, rng):
        too_wide = BRUTE_FORCE_MAX_DIM + 1

        def predict(Xq):
            return np.atleast_2d(Xq).sum(axis=1)

        with pytest.raises(ValueError, match="brute force limited"):
            brute_force_shap(predict, np.zeros(too_wide),
                             BackgroundSet(X=np.zeros((2, too_wide))))


class TestExplanationContainer:
    def make(self):
        return Explanation(
            base_value=0.4, prediction=0.55,
            column_phi=np.array([0.1, 0.05, 0.0]),
            contributions=(("a", 0.1), ("b", 0.05), ("c", 0.0)))

    def test_phi_sum_and_gap(self):
        e = self.make()
        assert e.phi_sum == pytest.approx(0.15)
        assert e.additivity_gap == pytest.approx(0.0, abs=1e-15)

    def test_contribution_lookup(self):
        e = self.make()
        assert e.contribution("b") == 0.05
        with pytest.raises(KeyError):
            e.contribution("zzz")

    def test_top_features_order_and_ties(self):
        e = Explanation(
            base_value=0.0, prediction=0.0,
            column_phi=np.zeros(4),
            contributions=(("d", -0.2), ("a", 0.1), ("c", 0.2), ("b", -0.1)))
        # |phi| descending; exact ties alphabetical.
        assert e.top_features(4) == ("c", "d", "a", "b")
        assert e.top_features(2) == ("c", "d")
        assert e.top_features(0) == ()

    def test_to_dict_shape(self):
        d = self.make().to_dict()
        assert set(d) == {"base_value", "prediction", "contributions"}
        assert d["contributions"][0] == {"feature": "a", "phi": 0.1}


class TestAggregation:
    def test_one_hot_groups_sum(self, schema, encoding, forest30,
                                 background16, cases120):
        x = encode(schema, cases120[0], encoding)
        e = tree_shap(forest30, x, background16, encoding=encoding)
        # One aggregated entry per raw feature, in schema order.
        assert tuple(f for f, _ in e.contributions) == encoding.feature_ids()
        for fid, phi in e.contributions:
            idx = encoding.column_indices(fid)
            assert phi == pytest.approx(float(np.sum(e.column_phi[idx])), abs=1e-15)
        # Aggregation preserves the total.
        assert sum(p for _, p in e.contributions) == pytest.approx(
            e.phi_sum, abs=1e-12)

    def test_without_encoding_columns_are_features(self):
        contribs = aggregate_contributions(np.array([0.1, -0.2]), None)
        assert contribs == (("x0", 0.1), ("x1", -0.2))
        named = aggregate_contributions(np.array([0.3]), None, columns=("rent",))
        assert named == (("rent", 0.3),)
