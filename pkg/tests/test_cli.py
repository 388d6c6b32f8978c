"""End-to-end CLI pipeline on a small corpus, plus error envelopes."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from types import SimpleNamespace

import pytest

from equarent import __version__
from equarent.bundle import load_bundle
from equarent.casegen.dataset import Dataset
from equarent.cli import main

MANIFEST_KEYS = {"subcommand", "package_version", "arguments",
                 "input_digests", "output_paths", "wall_time_s"}


def read_json(path: Path):
    return json.loads(Path(path).read_text(encoding="utf-8"))


@pytest.fixture(scope="module")
def pipeline(tmp_path_factory):
    """One full gen -> render -> label -> train -> prune -> query run."""
    root = tmp_path_factory.mktemp("cli")
    p = SimpleNamespace(
        root=root,
        cases=root / "cases.json",
        deeds=root / "deeds",
        labels=root / "labels.csv",
        dataset=root / "dataset.json",
        dataset2=root / "dataset_reingested.json",
        bundle=root / "bundle.json",
        pruned=root / "pruned.json",
        kept=root / "kept.json",
        explanation=root / "explanation.json",
        cf=root / "cf.json",
    )
    assert main(["gen-cases", "--n", "40", "--seed", "11",
                 "--out", str(p.cases)]) == 0
    assert main(["render-docs", "--cases", str(p.cases),
                 "--out", str(p.deeds)]) == 0
    assert main(["oracle-label", "--cases", str(p.cases), "--seed", "11",
                 "--max-answers", "30", "--labels-out", str(p.labels),
                 "--out", str(p.dataset)]) == 0
    assert main(["ingest-labels", "--cases", str(p.cases),
                 "--labels", str(p.labels), "--out", str(p.dataset2)]) == 0
    assert main(["train", "--dataset", str(p.dataset), "--trees", "8",
                 "--seed", "3", "--background", "16",
                 "--importance-rows", "20", "--out", str(p.bundle)]) == 0
    assert main(["prune", "--dataset", str(p.dataset),
                 "--bundle", str(p.bundle), "--threshold", "1e-5",
                 "--out", str(p.pruned), "--kept-out", str(p.kept)]) == 0
    assert main(["explain", "--bundle", str(p.bundle),
                 "--cases", str(p.cases), "--case-id", "case-11-00000",
                 "--out", str(p.explanation)]) == 0
    assert main(["counterfactual", "--bundle", str(p.bundle),
                 "--cases", str(p.cases), "--case-id", "case-11-00000",
                 "--k", "2", "--delta", "0.05", "--out", str(p.cf)]) == 0
    return p


class TestArtifacts:
    def test_cases_file(self, pipeline, schema):
        doc = read_json(pipeline.cases)
        assert doc["schema_digest"] == schema.digest()
        assert len(doc["cases"]) == 40
        assert doc["cases"][0]["case_id"] == "case-11-00000"

    def test_rendered_deeds(self, pipeline):
        deeds = sorted(pipeline.deeds.glob("*.txt"))
        assert len(deeds) == 40
        assert "ORDERS the reduction" in deeds[0].read_text(encoding="utf-8")

    def test_partial_labeling(self, pipeline, schema):
        ds = Dataset.from_dict(read_json(pipeline.dataset))
        assert len(ds) == 30 and ds.n_unlabeled == 10
        assert ds.schema_digest == schema.digest()

    def test_reingested_dataset_is_byte_identical(self, pipeline):
        assert pipeline.dataset.read_bytes() == pipeline.dataset2.read_bytes()

    def test_trained_bundle(self, pipeline):
        bundle = load_bundle(pipeline.bundle)
        assert type(bundle.model).__name__ == "RandomForest"
        assert bundle.metadata["n_trees"] == 8
        assert bundle.metadata["n_rows"] == 30
        assert bundle.importance is not None
        assert bundle.metadata["importance_rows"] == 20

    def test_prune_outputs(self, pipeline, schema):
        kept_doc = read_json(pipeline.kept)
        assert kept_doc["threshold"] == 1e-5
        kept, dropped = set(kept_doc["kept"]), set(kept_doc["dropped"])
        assert kept and kept | dropped == set(schema.feature_ids)
        assert not kept & dropped
        pruned = Dataset.from_dict(read_json(pipeline.pruned))
        assert len(pruned) == 30

    def test_explanation_payload(self, pipeline):
        doc = read_json(pipeline.explanation)
        assert doc["case_id"] == "case-11-00000"
        assert abs(doc["base_value"] + doc["phi_sum"] - doc["prediction"]) <= 1e-9
        assert len(doc["contributions"]) == 25
        assert doc["waterfall"]["kind"] == "waterfall"
        assert doc["bundle_digest"] == load_bundle(pipeline.bundle).digest()

    def test_counterfactual_payload(self, pipeline):
        doc = read_json(pipeline.cf)
        assert doc["target"] == {"kind": "change", "delta": 0.05,
                                 "direction": "any"}
        assert len(doc["results"]) == 2
        for entry in doc["results"]:
            assert entry["status"] in ("found", "not_found", "error")


class TestManifests:
    def test_every_artifact_has_a_manifest(self, pipeline):
        for out in (pipeline.cases, pipeline.dataset, pipeline.dataset2,
                    pipeline.bundle, pipeline.pruned, pipeline.explanation,
                    pipeline.cf):
            manifest = out.with_name(out.name + ".manifest.json")
            assert manifest.exists(), manifest
            assert set(read_json(manifest)) == MANIFEST_KEYS

    def test_train_manifest_contents(self, pipeline):
        doc = read_json(pipeline.bundle.with_name("bundle.json.manifest.json"))
        assert doc["subcommand"] == "train"
        assert doc["package_version"] == __version__
        assert doc["arguments"]["trees"] == 8
        assert "func" not in doc["arguments"]
        assert doc["output_paths"] == [str(pipeline.bundle)]
        assert doc["wall_time_s"] >= 0
        digest = hashlib.sha256(pipeline.dataset.read_bytes()).hexdigest()
        assert doc["input_digests"] == {str(pipeline.dataset): digest}


class TestDeterminism:
    def test_same_seed_same_bytes(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        for out in (a, b):
            assert main(["gen-cases", "--n", "12", "--seed", "4",
                         "--out", str(out)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_retrain_same_seed_same_bundle_bytes(self, pipeline, tmp_path):
        out = tmp_path / "bundle_again.json"
        assert main(["train", "--dataset", str(pipeline.dataset),
                     "--trees", "8", "--seed", "3", "--background", "16",
                     "--importance-rows", "20", "--out", str(out)]) == 0
        assert out.read_bytes() == pipeline.bundle.read_bytes()


class TestEvaluate:
    def test_table_and_report(self, pipeline, tmp_path, capsys):
        out = tmp_path / "eval.json"
        assert main(["evaluate", "--dataset", str(pipeline.dataset),
                     "--k", "4", "--trees", "4", "--epochs", "3",
                     "--out", str(out)]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "4-fold cross-validated MAE on 30 rows"
        listed = [ln.split()[0] for ln in lines[2:]]
        assert listed == ["forest", "linear", "mlp", "tree", "constant",
                          "median"]
        report = read_json(out)
        assert set(report) == set(listed)
        for model_id, rep in report.items():
            assert len(rep["fold_maes"]) == 4, model_id


class TestStdoutMode:
    def test_explain_prints_payload_without_out(self, pipeline, tmp_path,
                                                capsys):
        case_doc = read_json(pipeline.cases)["cases"][0]
        case_file = tmp_path / "one_case.json"
        case_file.write_text(json.dumps(case_doc["values"]))
        assert main(["explain", "--bundle", str(pipeline.bundle),
                     "--case", str(case_file)]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["case_id"] == "case"
        assert abs(payload["base_value"] + payload["phi_sum"]
                   - payload["prediction"]) <= 1e-9


class TestErrors:
    def expect_error(self, capsys, argv, code):
        assert main(argv) == 1
        err = json.loads(capsys.readouterr().err)
        assert err["code"] == code
        assert err["message"]
        return err

    def test_missing_input_file(self, tmp_path, capsys):
        self.expect_error(capsys, ["train", "--dataset",
                                   str(tmp_path / "absent.json"),
                                   "--out", str(tmp_path / "b.json")],
                          "missing_input")

    def test_unparseable_input(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("this is not json")
        self.expect_error(capsys, ["train", "--dataset", str(bad),
                                   "--out", str(tmp_path / "b.json")],
                          "bad_input")

    def test_schema_mismatch(self, pipeline, tmp_path, capsys):
        doc = read_json(pipeline.cases)
        doc["schema_digest"] = "0" * 64
        stale = tmp_path / "stale_cases.json"
        stale.write_text(json.dumps(doc))
        self.expect_error(capsys, ["render-docs", "--cases", str(stale),
                                   "--out", str(tmp_path / "deeds")],
                          "schema_mismatch")

    def test_empty_dataset_rejected_by_train(self, pipeline, tmp_path, capsys):
        empty_ds = tmp_path / "empty_dataset.json"
        with pytest.warns(UserWarning, match="label input is empty"):
            assert main(["oracle-label", "--cases", str(pipeline.cases),
                         "--max-answers", "0", "--out", str(empty_ds)]) == 0
        capsys.readouterr()
        self.expect_error(capsys, ["train", "--dataset", str(empty_ds),
                                   "--out", str(tmp_path / "b.json")],
                          "bad_input")

    def test_unknown_case_id(self, pipeline, tmp_path, capsys):
        self.expect_error(capsys, ["explain", "--bundle", str(pipeline.bundle),
                                   "--cases", str(pipeline.cases),
                                   "--case-id", "case-11-99999"],
                          "missing_input")

    def test_case_argument_required(self, pipeline, capsys):
        err = self.expect_error(capsys,
                                ["explain", "--bundle", str(pipeline.bundle)],
                                "missing_input")
        assert "--case" in err["message"]
