"""Capture wire-format fixtures for the frontend test suite.

Runs the real service in-process against a deterministically trained
bundle and freezes selected responses under tests/fixtures/. The client
tests consume only these payloads, so they exercise the exact JSON the
service emits without needing Python at test time.

Usage: python3 scripts/capture_fixtures.py  (from frontend/)
"""

from __future__ import annotations

import json
import warnings
from pathlib import Path

from fastapi.testclient import TestClient

from equarent.bundle import ModelBundle
from equarent.casegen import load_schema
from equarent.casegen.dataset import encode, ingest_labels
from equarent.casegen.oracle import label_cases, load_oracle
from equarent.casegen.sampler import sample_cases
from equarent.explain import BackgroundSet, global_importance, tree_shap
from equarent.models import fit_constant, fit_forest
from equarent.service import create_app

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def dump(name: str, payload: object) -> None:
    path = FIXTURES / name
    path.write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n")
    print(f"wrote {path.relative_to(Path.cwd())}")


def main() -> None:
    warnings.filterwarnings("ignore")
    FIXTURES.mkdir(parents=True, exist_ok=True)

    schema = load_schema()
    cases = sample_cases(schema, 120, seed=5)
    labels = label_cases(cases, load_oracle("oracle_default"), seed=5)
    dataset = ingest_labels(schema, cases, labels)
    X, y = dataset.matrix(schema)
    forest = fit_forest(X, y, n_trees=30, min_samples_split=10, seed=0)
    background = BackgroundSet.sample(X, size=16, seed=0)
    importance = global_importance(forest, X[:60], background, dataset.encoding)
    bundle = ModelBundle(schema=schema, encoding=dataset.encoding, model=forest,
                         background=background, importance=importance,
                         metadata={"model": "forest", "seed": 0})
    client = TestClient(create_app(bundle))

    dump("schema.json", client.get("/api/schema").json())
    dump("model.json", client.get("/api/model").json())
    dump("sample.json",
         client.post("/api/cases/sample", json={"n": 3, "seed": 42}).json())

    # A case whose top-3 attribution features include the rent, so the
    # default counterfactual batch exhibits all three entry statuses:
    # found, not_found, and error (rent is locked by the installment
    # equality, so its single-feature grid is empty).
    chosen = None
    for case in cases:
        x = encode(schema, case, dataset.encoding)
        top = tree_shap(forest, x, background,
                        encoding=dataset.encoding).top_features(3)
        if "monthly_rent" in top:
            body = client.post("/api/counterfactual",
                               json={"case": case.values}).json()
            statuses = {e["status"] for e in body["results"]}
            if statuses == {"found", "not_found", "error"}:
                chosen, cf_body = case, body
                break
    assert chosen is not None, "no case exhibits all three statuses"
    print(f"chosen case: {chosen.case_id}")

    dump("predict.json",
         client.post("/api/predict", json={"case": chosen.values}).json())
    dump("explain.json",
         client.post("/api/explain", json={"case": chosen.values}).json())
    dump("counterfactual.json", cf_body)

    # An unreachable target: nothing single-feature moves the award 0.9.
    dump("counterfactual_unreachable.json",
         client.post("/api/counterfactual", json={
             "case": chosen.values,
             "target": {"kind": "change", "delta": 0.9, "direction": "up"},
         }).json())

    # Hard violation: a missing field is rejected with field-level details.
    broken = {k: v for k, v in chosen.values.items() if k != "monthly_rent"}
    resp = client.post("/api/predict", json={"case": broken})
    assert resp.status_code == 422
    dump("error_invalid_case.json", resp.json())

    # Soft violation: installment amount off the equality grid still
    # predicts, with the violation surfaced as a warning.
    bent = dict(chosen.values)
    bent["installment_amount"] = float(bent["monthly_rent"]) * 2.0
    resp = client.post("/api/predict", json={"case": bent})
    assert resp.status_code == 200 and resp.json()["warnings"]
    dump("predict_warning.json", resp.json())

    # A constant model: every attribution is exactly zero, so the client
    # must fall back to its flat-waterfall presentation.
    constant = fit_constant(y)
    const_bundle = ModelBundle(schema=schema, encoding=dataset.encoding,
                               model=constant, background=background,
                               metadata={"model": "constant"})
    const_client = TestClient(create_app(const_bundle))
    dump("constant_explain.json",
         const_client.post("/api/explain", json={"case": chosen.values}).json())


if __name__ == "__main__":
    main()
