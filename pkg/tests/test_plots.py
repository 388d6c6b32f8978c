"""Plot payload builders (JSON shapes, no drawing)."""

from __future__ import annotations

import json

import numpy as np
import pytest

from equarent.casegen import encode
from equarent.explain import (
    PLOT_KINDS,
    beeswarm_payload,
    decision_payload,
    dependence_payload,
    force_payload,
    plot_payload,
    tree_shap,
    waterfall_payload,
)


@pytest.fixture(scope="module")
def explanations(schema, dataset120, forest30, background16):
    cases = [case for case, _ in dataset120.rows[:6]]
    exps = [tree_shap(forest30, encode(schema, c, dataset120.encoding),
                      background16, encoding=dataset120.encoding)
            for c in cases]
    values = [dict(c.values) for c in cases]
    return exps, values


class TestWaterfall:
    def test_cumulative_walk_reaches_prediction(self, explanations):
        exps, _ = explanations
        for ex in exps:
            payload = waterfall_payload(ex)
            assert payload["kind"] == "waterfall"
            assert payload["entries"][0]["start"] == payload["base_value"]
            for prev, cur in zip(payload["entries"], payload["entries"][1:]):
                assert cur["start"] == prev["end"]
            assert payload["entries"][-1]["end"] == pytest.approx(
                payload["prediction"], abs=1e-9)

    def test_entries_ranked_by_abs_phi(self, explanations):
        exps, _ = explanations
        payload = waterfall_payload(exps[0])
        mags = [abs(e["phi"]) for e in payload["entries"]]
        assert mags == sorted(mags, reverse=True)
        assert len(payload["entries"]) == len(exps[0].contributions)


class TestForce:
    def test_signed_partition(self, explanations):
        exps, _ = explanations
        payload = force_payload(exps[0])
        assert all(e["phi"] > 0 for e in payload["positive"])
        assert all(e["phi"] < 0 for e in payload["negative"])
        total = (sum(e["phi"] for e in payload["positive"])
                 + sum(e["phi"] for e in payload["negative"]))
        assert payload["base_value"] + total == pytest.approx(
            payload["prediction"], abs=1e-9)


class TestBeeswarm:
    def test_point_clouds_with_values(self, explanations):
        exps, values = explanations
        payload = beeswarm_payload(exps, values)
        assert payload["kind"] == "beeswarm"
        by_feature = {f["feature"]: f["points"] for f in payload["features"]}
        assert len(by_feature) == len(exps[0].contributions)
        for points in by_feature.values():
            assert len(points) == len(exps)
        # Numeric features carry numbers, categoricals null, booleans 0/1.
        rent = by_feature["monthly_rent"]
        assert all(isinstance(p["value"], float) for p in rent)
        sector = by_feature["ateco_sector"]
        assert all(p["value"] is None for p in sector)
        flag = by_feature["sole_income_flag"]
        assert set(p["value"] for p in flag) <= {0.0, 1.0}

    def test_features_ordered_by_mean_abs_phi(self, explanations):
        exps, values = explanations
        payload = beeswarm_payload(exps, values)
        means = [np.mean([abs(p["phi"]) for p in f["points"]])
                 for f in payload["features"]]
        assert means == sorted(means, reverse=True)

    def test_input_validation(self, explanations):
        exps, values = explanations
        with pytest.raises(ValueError, match="one value mapping"):
            beeswarm_payload(exps, values[:-1])
        with pytest.raises(ValueError, match="at least one"):
            beeswarm_payload([], [])


class TestDependence:
    def test_one_feature_across_instances(self, explanations):
        exps, values = explanations
        payload = dependence_payload(exps, values, "loss_pct_tenant_income")
        assert payload["feature"] == "loss_pct_tenant_income"
        assert len(payload["points"]) == len(exps)
        for point, ex, vals in zip(payload["points"], exps, values):
            assert point["phi"] == ex.contribution("loss_pct_tenant_income")
            assert point["value"] == vals["loss_pct_tenant_income"]

    def test_unknown_feature_rejected(self, explanations):
        exps, values = explanations
        with pytest.raises(ValueError, match="unknown feature"):
            dependence_payload(exps, values, "ghost")


class TestDecision:
    def test_paths_from_base_to_prediction(self, explanations):
        exps, _ = explanations
        payload = decision_payload(exps)
        assert len(payload["paths"]) == len(exps)
        n_features = len(payload["features"])
        for path, ex in zip(payload["paths"], exps):
            assert len(path["cumulative"]) == n_features + 1
            assert path["cumulative"][0] == ex.base_value
            assert path["cumulative"][-1] == pytest.approx(ex.prediction, abs=1e-9)

    def test_features_least_important_first(self, explanations):
        exps, values = explanations
        decision = decision_payload(exps)
        beeswarm = beeswarm_payload(exps, values)
        assert decision["features"] == [f["feature"]
                                        for f in reversed(beeswarm["features"])]


class TestDispatcher:
    def test_all_kinds_dispatch(self, explanations):
        exps, values = explanations
        for kind in PLOT_KINDS:
            payload = plot_payload(kind, explanation=exps[0],
                                   explanations=exps, feature_values=values,
                                   feature="monthly_rent")
            assert payload["kind"] == kind
            json.dumps(payload)  # JSON-ready, no numpy scalars

    def test_unknown_kind_and_missing_inputs(self, explanations):
        exps, values = explanations
        with pytest.raises(ValueError, match="unknown plot kind"):
            plot_payload("heatmap", explanation=exps[0])
        with pytest.raises(ValueError, match="single explanation"):
            plot_payload("waterfall")
        with pytest.raises(ValueError, match="needs explanations"):
            plot_payload("beeswarm", explanation=exps[0])
        with pytest.raises(ValueError, match="a feature"):
            plot_payload("dependence", explanations=exps, feature_values=values)
