"""Bundle integrity: construction, dispatch, digests, save/load."""

from __future__ import annotations

import json

import numpy as np
import pytest

from equarent.bundle import (
    BundleIntegrityError,
    ModelBundle,
    load_bundle,
    save_bundle,
)
from equarent.casegen import load_schema
from equarent.casegen.dataset import build_encoding
from equarent.explain import BackgroundSet, aggregate_contributions, tree_shap
from equarent.models import (
    ConstantModel,
    RandomForest,
    fit_forest,
    fit_linear,
    fit_mlp,
    fit_tree,
)


@pytest.fixture(scope="module")
def cases(dataset120):
    return [case for case, _ in dataset120.rows[:10]]


class TestConstruction:
    def test_encoding_must_match_schema(self, schema, dataset120, forest30,
                                        background16):
        doc = schema.to_dict()
        doc["version"] = doc["version"] + "-other"
        other_encoding = build_encoding(load_schema(doc))
        with pytest.raises(BundleIntegrityError, match="different schema"):
            ModelBundle(schema=schema, encoding=other_encoding, model=forest30,
                        background=background16)

    def test_model_width_must_match_encoding(self, schema, dataset120,
                                             matrix120, background16):
        narrow = fit_tree(matrix120[0][:, :6], matrix120[1], min_samples_split=10)
        with pytest.raises(BundleIntegrityError, match="columns"):
            ModelBundle(schema=schema, encoding=dataset120.encoding,
                        model=narrow, background=background16)

    def test_background_width_must_match_encoding(self, schema, dataset120,
                                                  matrix120, forest30):
        narrow_bg = BackgroundSet.sample(matrix120[0][:, :6], size=4, seed=0)
        with pytest.raises(BundleIntegrityError, match="background has"):
            ModelBundle(schema=schema, encoding=dataset120.encoding,
                        model=forest30, background=narrow_bg)


class TestDispatch:
    def test_forest_predict_and_explain(self, bundle120, schema, dataset120,
                                        forest30, background16, cases):
        for case in cases[:4]:
            x = bundle120.encode_case(case)
            assert bundle120.predict_case(case) == float(
                np.asarray(forest30.predict(x[None, :]))[0])
            direct = tree_shap(forest30, x, background16,
                               encoding=dataset120.encoding)
            via_bundle = bundle120.explain_case(case)
            assert via_bundle.base_value == direct.base_value
            assert via_bundle.prediction == direct.prediction
            assert via_bundle.contributions == direct.contributions

    def test_single_tree_explained_as_forest_of_one(self, schema, dataset120,
                                                    matrix120, background16,
                                                    cases):
        tree = fit_tree(matrix120[0], matrix120[1], min_samples_split=10)
        bundle = ModelBundle(schema=schema, encoding=dataset120.encoding,
                             model=tree, background=background16)
        one = RandomForest(trees=(tree,), seed=0, min_samples_split=0,
                           bootstrap=False)
        for case in cases[:3]:
            exp = bundle.explain_case(case)
            ref = tree_shap(one, bundle.encode_case(case), background16,
                            encoding=dataset120.encoding)
            assert exp.contributions == ref.contributions
            assert abs(exp.base_value + exp.phi_sum - exp.prediction) <= 1e-12

    def test_constant_bundle_has_flat_explanations(self, schema, dataset120,
                                                   background16, cases):
        bundle = ModelBundle(schema=schema, encoding=dataset120.encoding,
                             model=ConstantModel(value=0.25),
                             background=background16)
        exp = bundle.explain_case(cases[0])
        assert exp.base_value == 0.25 and exp.prediction == 0.25
        assert all(phi == 0.0 for _, phi in exp.contributions)
        assert bundle.predict_case(cases[0]) == 0.25

    def test_linear_bundle_uses_closed_form(self, schema, dataset120,
                                            matrix120, background16, cases):
        linear = fit_linear(matrix120[0], matrix120[1])
        bundle = ModelBundle(schema=schema, encoding=dataset120.encoding,
                             model=linear, background=background16)
        for case in cases[:3]:
            x = bundle.encode_case(case)
            exp = bundle.explain_case(case)
            column_phi = np.asarray(linear.weights) * (
                x - background16.X.mean(axis=0))
            assert exp.contributions == aggregate_contributions(
                column_phi, dataset120.encoding)
            assert abs(exp.base_value + exp.phi_sum - exp.prediction) <= 1e-10

    def test_mlp_bundle_predicts_but_cannot_explain(self, schema, dataset120,
                                                    matrix120, background16,
                                                    cases):
        mlp = fit_mlp(matrix120[0], matrix120[1], hidden=(8,), epochs=2, seed=0)
        bundle = ModelBundle(schema=schema, encoding=dataset120.encoding,
                             model=mlp, background=background16)
        assert 0.0 <= bundle.predict_case(cases[0]) <= 1.0
        with pytest.raises(ValueError, match="exact explanations are unavailable"):
            bundle.explain_case(cases[0])


class TestDigests:
    def test_digest_is_stable_and_survives_dict_roundtrip(self, bundle120):
        d1 = bundle120.digest()
        assert d1 == bundle120.digest()
        assert len(d1) == 64 and set(d1) <= set("0123456789abcdef")
        again = ModelBundle.from_dict(bundle120.to_dict())
        assert again.digest() == d1

    def test_identical_training_runs_share_a_digest(self, schema, dataset120,
                                                    matrix120, background16):
        def build():
            forest = fit_forest(matrix120[0], matrix120[1], n_trees=4,
                                min_samples_split=10, seed=7)
            return ModelBundle(schema=schema, encoding=dataset120.encoding,
                               model=forest, background=background16,
                               metadata={"model": "forest", "seed": 7})
        assert build().digest() == build().digest()

    def test_metadata_changes_the_digest(self, schema, dataset120, forest30,
                                         background16, bundle120):
        other = ModelBundle(schema=schema, encoding=dataset120.encoding,
                            model=forest30, background=background16,
                            metadata={**bundle120.metadata, "note": "x"})
        assert other.digest() != bundle120.digest()


class TestSaveLoad:
    def test_roundtrip_preserves_predictions_exactly(self, bundle120, cases,
                                                     tmp_path):
        path = tmp_path / "bundle.json"
        digest = save_bundle(bundle120, path)
        assert json.loads(path.read_text())["digest"] == digest
        loaded = load_bundle(path)
        assert loaded.digest() == digest == bundle120.digest()
        for case in cases:
            a = bundle120.predict_case(case)
            b = loaded.predict_case(case)
            assert a == b  # bitwise, well inside the 1e-12 contract
        assert loaded.to_dict() == bundle120.to_dict()

    def test_edited_file_is_rejected(self, bundle120, tmp_path):
        path = tmp_path / "bundle.json"
        save_bundle(bundle120, path)
        doc = json.loads(path.read_text())
        doc["metadata"]["origin"] = "tampered"
        path.write_text(json.dumps(doc))
        with pytest.raises(BundleIntegrityError, match="digest mismatch"):
            load_bundle(path)

    def test_truncated_file_is_rejected(self, bundle120, tmp_path):
        path = tmp_path / "bundle.json"
        save_bundle(bundle120, path)
        text = path.read_text()
        path.write_text(text[: len(text) // 2])
        with pytest.raises(BundleIntegrityError, match="unreadable"):
            load_bundle(path)

    def test_digestless_file_is_rejected(self, bundle120, tmp_path):
        path = tmp_path / "bundle.json"
        save_bundle(bundle120, path)
        doc = json.loads(path.read_text())
        doc.pop("digest")
        path.write_text(json.dumps(doc))
        with pytest.raises(BundleIntegrityError, match="no digest"):
            load_bundle(path)

    def test_missing_file_is_rejected(self, tmp_path):
        with pytest.raises(BundleIntegrityError, match="unreadable"):
            load_bundle(tmp_path / "nope.json")

    def test_unsupported_format_version(self, bundle120):
        doc = bundle120.to_dict()
        doc["format_version"] = 2
        with pytest.raises(BundleIntegrityError, match="unsupported bundle format"):
            ModelBundle.from_dict(doc)
