"""One executable driving the full pipeline.

Subcommands compose via files: gen-cases emits a cases file,
render-docs turns cases into deed texts, oracle-label/ingest-labels
produce a dataset, train produces a model bundle, evaluate prints the
cross-validated comparison table, prune reduces the feature set,
explain/counterfactual emit payload files, and serve exposes the wire
API.  Every artifact-producing subcommand writes a run manifest next to
its output so the artifact is reproducible from the manifest alone.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

import numpy as np

from equarent import __version__
from equarent.bundle import ModelBundle, load_bundle, save_bundle
from equarent.casegen.dataset import (Dataset, ingest_labels, read_label_file,
                                      write_label_file)
from equarent.casegen.documents import write_documents
from equarent.casegen.oracle import label_cases, load_oracle, check_oracle
from equarent.casegen.sampler import sample_cases
from equarent.casegen.schema import CaseRecord, FeatureSchema, load_schema
from equarent.counterfactual import (GridSpec, Target, counterfactuals_for_top_k)
from equarent.explain.importance import global_importance, prune_features
from equarent.explain.plots import waterfall_payload
from equarent.explain.shap_values import BackgroundSet
from equarent.models.baselines import fit_constant, fit_linear, fit_median
from equarent.models.evaluation import cross_validate
from equarent.models.forest import fit_forest
from equarent.models.mlp import fit_mlp
from equarent.models.tree import fit_tree

MODEL_TABLE_ORDER = ("forest", "linear", "mlp", "tree", "constant", "median")


class CliError(Exception):
    def __init__(self, code: str, message: str):
        self.code = code
        super().__init__(message)


# ---------------------------------------------------------------- helpers

def _sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_json(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=False) + "\n",
                    encoding="utf-8")


def _read_json(path: Path):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise CliError("missing_input", f"input file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise CliError("bad_input", f"not valid JSON: {path} ({exc})") from None


def _write_manifest(args: argparse.Namespace, inputs: list[Path],
                    outputs: list[Path], started: float) -> None:
    """Reproducibility record beside the subcommand's primary output."""
    if not outputs:
        return
    primary = Path(outputs[0])
    manifest = {
        "subcommand": args.subcommand,
        "package_version": __version__,
        "arguments": {k: (str(v) if isinstance(v, Path) else v)
                      for k, v in vars(args).items()
                      if k not in ("func", "subcommand")},
        "input_digests": {str(p): _sha256_file(Path(p))
                          for p in inputs if Path(p).exists()},
        "output_paths": [str(p) for p in outputs],
        "wall_time_s": round(time.time() - started, 3),
    }
    _write_json(primary.with_name(primary.name + ".manifest.json"), manifest)


def _load_schema_arg(args) -> FeatureSchema:
    return load_schema(args.schema) if getattr(args, "schema", None) else load_schema()


def _load_cases_file(path: Path, schema: FeatureSchema) -> list[CaseRecord]:
    doc = _read_json(path)
    if doc.get("schema_digest") not in (None, schema.digest()):
        raise CliError("schema_mismatch",
                       f"cases in {path} were sampled under a different schema")
    return [CaseRecord(c["case_id"], c["values"]) for c in doc["cases"]]


def _load_dataset(path: Path, schema: FeatureSchema) -> Dataset:
    ds = Dataset.from_dict(_read_json(path))
    if ds.schema_digest != schema.digest():
        raise CliError("schema_mismatch",
                       f"dataset {path} was encoded under a different schema")
    return ds


def _load_case_arg(args, schema: FeatureSchema) -> CaseRecord:
    """One case from --case FILE, or --cases FILE with --case-id ID."""
    if getattr(args, "case", None):
        doc = _read_json(Path(args.case))
        if "values" in doc:
            return CaseRecord(doc.get("case_id", "case"), doc["values"])
        return CaseRecord("case", doc)
    if getattr(args, "cases", None) and getattr(args, "case_id", None):
        for c in _load_cases_file(Path(args.cases), schema):
            if c.case_id == args.case_id:
                return c
        raise CliError("missing_input",
                       f"case id {args.case_id!r} not found in {args.cases}")
    raise CliError("missing_input",
                   "provide --case FILE, or --cases FILE with --case-id ID")


# ------------------------------------------------------------ subcommands

def cmd_gen_cases(args) -> int:
    t0 = time.time()
    schema = _load_schema_arg(args)
    cases = sample_cases(schema, args.n, seed=args.seed)
    out = Path(args.out)
    _write_json(out, {
        "schema_version": schema.version,
        "schema_digest": schema.digest(),
        "seed": args.seed,
        "cases": [{"case_id": c.case_id, "values": c.values} for c in cases],
    })
    inputs = [Path(args.schema)] if args.schema else []
    _write_manifest(args, inputs, [out], t0)
    print(f"wrote {len(cases)} cases to {out}")
    return 0


def cmd_render_docs(args) -> int:
    t0 = time.time()
    schema = _load_schema_arg(args)
    cases = _load_cases_file(Path(args.cases), schema)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = write_documents(schema, cases, out_dir)
    _write_manifest(args, [Path(args.cases)], [out_dir], t0)
    print(f"rendered {len(paths)} deeds into {out_dir}")
    return 0


def cmd_oracle_label(args) -> int:
    t0 = time.time()
    schema = _load_schema_arg(args)
    cases = _load_cases_file(Path(args.cases), schema)
    oracle = load_oracle(args.oracle)
    check_oracle(oracle, schema)
    if args.noise > 0:
        oracle = oracle.with_noise(args.noise)
    labels = label_cases(cases, oracle, seed=args.seed)
    if args.max_answers is not None and args.max_answers < len(labels):
        # Simulated partial labeling: a fixed-seed subset answers.
        rng = np.random.default_rng([args.seed, len(labels)])
        keep = np.sort(rng.choice(len(labels), size=args.max_answers,
                                  replace=False))
        labels = [labels[i] for i in keep]
    if args.labels_out:
        write_label_file(Path(args.labels_out), labels)
    ds = ingest_labels(schema, cases, labels)
    out = Path(args.out)
    _write_json(out, ds.to_dict())
    outputs = [out] + ([Path(args.labels_out)] if args.labels_out else [])
    _write_manifest(args, [Path(args.cases)], outputs, t0)
    print(f"labeled {len(ds)} of {len(cases)} cases "
          f"({ds.n_unlabeled} unanswered) -> {out}")
    return 0


def cmd_ingest_labels(args) -> int:
    t0 = time.time()
    schema = _load_schema_arg(args)
    cases = _load_cases_file(Path(args.cases), schema)
    labels = read_label_file(Path(args.labels))
    ds = ingest_labels(schema, cases, labels)
    out = Path(args.out)
    _write_json(out, ds.to_dict())
    _write_manifest(args, [Path(args.cases), Path(args.labels)], [out], t0)
    print(f"ingested {len(ds)} labels ({ds.n_unlabeled} unanswered) -> {out}")
    return 0


def cmd_train(args) -> int:
    t0 = time.time()
    schema = _load_schema_arg(args)
    ds = _load_dataset(Path(args.dataset), schema)
    X, y = ds.matrix(schema)
    if X.shape[0] == 0:
        raise CliError("bad_input", "dataset holds no labeled rows")
    forest = fit_forest(X, y, n_trees=args.trees,
                        min_samples_split=args.min_split, seed=args.seed)
    background = BackgroundSet.sample(X, size=args.background, seed=args.seed)
    rows = X if args.importance_rows in (None, 0) else X[:args.importance_rows]
    importance = global_importance(forest, rows, background, ds.encoding)
    bundle = ModelBundle(
        schema=schema, encoding=ds.encoding, model=forest,
        background=background, importance=importance,
        metadata={
            "model": "forest",
            "seed": args.seed,
            "n_trees": args.trees,
            "min_samples_split": args.min_split,
            "background_size": background.size,
            "n_rows": int(X.shape[0]),
            "n_columns": int(X.shape[1]),
            "dataset_digest": ds.digest(),
            "importance_rows": int(rows.shape[0]),
        })
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    digest = save_bundle(bundle, out)
    _write_manifest(args, [Path(args.dataset)], [out], t0)
    print(f"trained forest ({args.trees} trees) on {X.shape[0]} rows -> {out}")
    print(f"bundle digest {digest}")
    return 0


def cmd_evaluate(args) -> int:
    t0 = time.time()
    schema = _load_schema_arg(args)
    ds = _load_dataset(Path(args.dataset), schema)
    X, y = ds.matrix(schema)
    trainers = {
        "forest": lambda Xt, yt: fit_forest(
            Xt, yt, n_trees=args.trees, min_samples_split=args.min_split,
            seed=args.seed),
        "linear": lambda Xt, yt: fit_linear(Xt, yt),
        "mlp": lambda Xt, yt: fit_mlp(
            Xt, yt, epochs=args.epochs, batch_size=args.batch, seed=args.seed),
        "tree": lambda Xt, yt: fit_tree(
            Xt, yt, min_samples_split=args.min_split),
        "constant": lambda Xt, yt: fit_constant(yt),
        "median": lambda Xt, yt: fit_median(yt),
    }
    reports = {}
    for model_id in MODEL_TABLE_ORDER:
        reports[model_id] = cross_validate(trainers[model_id], X, y,
                                           k=args.k, seed=args.seed,
                                           model_id=model_id)
    width = max(len(m) for m in MODEL_TABLE_ORDER)
    print(f"{args.k}-fold cross-validated MAE on {len(y)} rows")
    print(f"{'model'.ljust(width)}  mean MAE")
    for model_id in MODEL_TABLE_ORDER:
        print(f"{model_id.ljust(width)}  {reports[model_id].mean_mae:.4f}")
    if args.out:
        out = Path(args.out)
        _write_json(out, {m: r.to_dict() for m, r in reports.items()})
        _write_manifest(args, [Path(args.dataset)], [out], t0)
    return 0


def cmd_prune(args) -> int:
    t0 = time.time()
    schema = _load_schema_arg(args)
    ds = _load_dataset(Path(args.dataset), schema)
    bundle = load_bundle(Path(args.bundle))
    if bundle.importance is None:
        raise CliError("bad_input",
                       "bundle carries no importance report; retrain first")
    result = prune_features(bundle.importance, threshold=args.threshold)
    reduced = ds.project(result.kept)
    out = Path(args.out)
    _write_json(out, reduced.to_dict())
    kept_out = Path(args.kept_out) if args.kept_out \
        else out.with_name("kept_features.json")
    _write_json(kept_out, {
        "threshold": result.threshold,
        "kept": list(result.kept),
        "dropped": list(result.dropped),
    })
    _write_manifest(args, [Path(args.dataset), Path(args.bundle)],
                    [out, kept_out], t0)
    print(f"kept {len(result.kept)} features, dropped {len(result.dropped)} "
          f"{list(result.dropped)} -> {out}")
    return 0


def cmd_explain(args) -> int:
    t0 = time.time()
    bundle = load_bundle(Path(args.bundle))
    case = _load_case_arg(args, bundle.schema)
    explanation = bundle.explain_case(case)
    payload = {
        "case_id": case.case_id,
        "prediction": explanation.prediction,
        "base_value": explanation.base_value,
        "phi_sum": explanation.phi_sum,
        "contributions": [{"feature": f, "phi": p}
                          for f, p in explanation.contributions],
        "waterfall": waterfall_payload(explanation),
        "bundle_digest": bundle.digest(),
    }
    if args.out:
        out = Path(args.out)
        _write_json(out, payload)
        inputs = [Path(p) for p in (args.bundle, args.case or args.cases) if p]
        _write_manifest(args, inputs, [out], t0)
        print(f"wrote explanation to {out}")
    else:
        print(json.dumps(payload, indent=2))
    return 0


def cmd_counterfactual(args) -> int:
    t0 = time.time()
    bundle = load_bundle(Path(args.bundle))
    case = _load_case_arg(args, bundle.schema)
    explanation = bundle.explain_case(case)
    target = Target(kind="change", delta=args.delta, direction=args.direction)
    entries = counterfactuals_for_top_k(
        bundle.model, bundle.schema, case, explanation, k=args.k,
        target=target, grid=GridSpec(), encoding=bundle.encoding)
    payload = {
        "case_id": case.case_id,
        "original_prediction": explanation.prediction,
        "target": target.to_dict(),
        "results": [e.to_dict() for e in entries],
        "bundle_digest": bundle.digest(),
    }
    if args.out:
        out = Path(args.out)
        _write_json(out, payload)
        inputs = [Path(p) for p in (args.bundle, args.case or args.cases) if p]
        _write_manifest(args, inputs, [out], t0)
        print(f"wrote {len(entries)} counterfactual entries to {out}")
    else:
        print(json.dumps(payload, indent=2))
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from equarent.service import create_app

    bundle = load_bundle(Path(args.bundle))
    target = Target(kind="change", delta=args.delta, direction="any")
    app = create_app(bundle, static_dir=args.static, default_target=target)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


# -------------------------------------------------------------- argument wiring

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="equarent",
        description="rent-reduction decision support: generate, label, train, "
                    "explain, serve")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=func)
        p.add_argument("--schema", default=None,
                       help="schema YAML (default: shipped schema)")
        return p

    p = add("gen-cases", cmd_gen_cases, "sample constraint-valid synthetic cases")
    p.add_argument("--n", type=int, default=600)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--out", default="cases.json")

    p = add("render-docs", cmd_render_docs, "render deed texts for a cases file")
    p.add_argument("--cases", required=True)
    p.add_argument("--out", default="deeds")

    p = add("oracle-label", cmd_oracle_label,
            "label cases with a configured oracle (panel stand-in)")
    p.add_argument("--cases", required=True)
    p.add_argument("--oracle", default="oracle_default")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--max-answers", type=int, default=None,
                   help="simulate partial labeling: only this many cases answer")
    p.add_argument("--labels-out", default=None,
                   help="also write the raw label file (CSV)")
    p.add_argument("--out", default="dataset.json")

    p = add("ingest-labels", cmd_ingest_labels, "build a dataset from a label file")
    p.add_argument("--cases", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--out", default="dataset.json")

    p = add("train", cmd_train, "train the forest and persist a model bundle")
    p.add_argument("--dataset", required=True)
    p.add_argument("--trees", type=int, default=100)
    p.add_argument("--min-split", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--background", type=int, default=64)
    p.add_argument("--importance-rows", type=int, default=None,
                   help="rows used for the importance report (default: all)")
    p.add_argument("--out", default="bundle.json")

    p = add("evaluate", cmd_evaluate, "k-fold CV comparison of all six models")
    p.add_argument("--dataset", required=True)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trees", type=int, default=100)
    p.add_argument("--min-split", type=int, default=10)
    p.add_argument("--epochs", type=int, default=200)
    p.add_argument("--batch", type=int, default=32)
    p.add_argument("--out", default=None)

    p = add("prune", cmd_prune, "drop features below the attribution threshold")
    p.add_argument("--dataset", required=True)
    p.add_argument("--bundle", required=True)
    p.add_argument("--threshold", type=float, default=1e-5)
    p.add_argument("--out", default="dataset_pruned.json")
    p.add_argument("--kept-out", default=None)

    p = add("explain", cmd_explain, "exact Shapley explanation for one case")
    p.add_argument("--bundle", required=True)
    p.add_argument("--case", default=None)
    p.add_argument("--cases", default=None)
    p.add_argument("--case-id", default=None)
    p.add_argument("--out", default=None)

    p = add("counterfactual", cmd_counterfactual,
            "single-feature counterfactuals for the top-k features")
    p.add_argument("--bundle", required=True)
    p.add_argument("--case", default=None)
    p.add_argument("--cases", default=None)
    p.add_argument("--case-id", default=None)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--delta", type=float, default=0.10)
    p.add_argument("--direction", choices=("up", "down", "any"), default="any")
    p.add_argument("--out", default=None)

    p = add("serve", cmd_serve, "run the inference service")
    p.add_argument("--bundle", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--static", default=None,
                   help="directory of built client assets to serve at /")
    p.add_argument("--delta", type=float, default=0.10)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(json.dumps({"code": exc.code, "message": str(exc)}),
              file=sys.stderr)
        return 1
    except Exception as exc:  # surface module errors in ApiError shape
        print(json.dumps({"code": "error",
                          "message": f"{type(exc).__name__}: {exc}"}),
              file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
