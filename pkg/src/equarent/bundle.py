"""The persisted unit of deployment: schema, encoder, model, background.

A bundle carries everything inference needs — feature schema, encoding
map, trained model, Shapley background set, importance report, and
training metadata — under one content digest.  Saving is canonical
(sorted keys, exact float round-trip), so identical training runs
produce bit-identical files and digests.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Optional

import numpy as np

from equarent import __version__
from equarent.casegen.dataset import EncodingMap, encode
from equarent.casegen.schema import (CaseRecord, FeatureSchema, canonical_json,
                                     load_schema, sha256_hex)
from equarent.explain.importance import ImportanceReport
from equarent.explain.shap_values import (BackgroundSet, Explanation,
                                          aggregate_contributions, tree_shap)
from equarent.models.baselines import ConstantModel, LinearModel
from equarent.models.forest import RandomForest
from equarent.models.serialize import model_from_dict, model_to_dict
from equarent.models.tree import DecisionTree

BUNDLE_FORMAT_VERSION = 1


class BundleIntegrityError(ValueError):
    """Digest mismatch or unsupported bundle format."""


@dataclass(frozen=True)
class ModelBundle:
    schema: FeatureSchema
    encoding: EncodingMap
    model: Any
    background: BackgroundSet
    importance: Optional[ImportanceReport] = None
    metadata: Mapping[str, Any] = field(default_factory=dict)
    format_version: int = BUNDLE_FORMAT_VERSION

    def __post_init__(self):
        if self.encoding.schema_digest != self.schema.digest():
            raise BundleIntegrityError(
                "encoding was built for a different schema "
                f"({self.encoding.schema_digest[:12]} != {self.schema.digest()[:12]})")
        n = getattr(self.model, "n_features", None)
        if n is not None and n != self.encoding.width:
            raise BundleIntegrityError(
                f"model expects {n} columns but the encoding produces "
                f"{self.encoding.width}")
        if self.background.X.shape[1] != self.encoding.width:
            raise BundleIntegrityError(
                f"background has {self.background.X.shape[1]} columns but the "
                f"encoding produces {self.encoding.width}")

    def encode_case(self, case: CaseRecord) -> np.ndarray:
        return encode(self.schema, case, self.encoding)

    def predict_case(self, case: CaseRecord) -> float:
        return float(np.asarray(self.model.predict(self.encode_case(case)[None, :]))[0])

    def explain_case(self, case: CaseRecord) -> Explanation:
        """Exact interventional Shapley explanation for this bundle's model.

        Forests and trees use the tree walk; constant and linear models
        have closed forms.  MLP bundles cannot be explained exactly and
        raise.
        """
        x = self.encode_case(case)
        model = self.model
        if isinstance(model, RandomForest):
            return tree_shap(model, x, self.background, self.encoding)
        if isinstance(model, DecisionTree):
            one_tree = RandomForest(trees=(model,), seed=0,
                                    min_samples_split=0, bootstrap=False)
            return tree_shap(one_tree, x, self.background, self.encoding)
        bg = self.background.X
        if isinstance(model, ConstantModel):
            column_phi = np.zeros(self.encoding.width)
        elif isinstance(model, LinearModel):
            # For a linear model the interventional Shapley value is
            # w_i * (x_i - E[z_i]) exactly.
            column_phi = np.asarray(model.weights) * (x - bg.mean(axis=0))
        else:
            raise ValueError(
                "exact explanations are unavailable for "
                f"{type(model).__name__} bundles")
        base = float(np.mean(np.asarray(model.predict(bg))))
        prediction = float(np.asarray(model.predict(x[None, :]))[0])
        return Explanation(base_value=base, prediction=prediction,
                           column_phi=column_phi,
                           contributions=aggregate_contributions(
                               column_phi, self.encoding))

    def to_dict(self) -> dict:
        return {
            "format_version": self.format_version,
            "package_version": __version__,
            "schema": self.schema.to_dict(),
            "encoding": self.encoding.to_dict(),
            "model": model_to_dict(self.model),
            "background": self.background.to_dict(),
            "importance": self.importance.to_dict() if self.importance else None,
            "metadata": dict(self.metadata),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ModelBundle":
        if d.get("format_version") != BUNDLE_FORMAT_VERSION:
            raise BundleIntegrityError(
                f"unsupported bundle format version {d.get('format_version')!r} "
                f"(this reader supports {BUNDLE_FORMAT_VERSION})")
        importance = d.get("importance")
        return cls(
            schema=load_schema(d["schema"]),
            encoding=EncodingMap.from_dict(d["encoding"]),
            model=model_from_dict(d["model"]),
            background=BackgroundSet.from_dict(d["background"]),
            importance=ImportanceReport.from_dict(importance) if importance else None,
            metadata=d.get("metadata", {}),
            format_version=int(d["format_version"]),
        )

    def digest(self) -> str:
        return sha256_hex(canonical_json(self.to_dict()))


def save_bundle(bundle: ModelBundle, path: str | Path) -> str:
    """Write the bundle with its content digest; returns the digest."""
    doc = bundle.to_dict()
    digest = sha256_hex(canonical_json(doc))
    doc_with_digest = {"digest": digest, **doc}
    Path(path).write_text(
        json.dumps(doc_with_digest, sort_keys=True, indent=None,
                   separators=(",", ":"), allow_nan=False),
        encoding="utf-8")
    return digest


def load_bundle(path: str | Path) -> ModelBundle:
    """Read and digest-verify a saved bundle."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise BundleIntegrityError(f"unreadable bundle file {path}: {exc}") from exc
    if not isinstance(doc, dict) or "digest" not in doc:
        raise BundleIntegrityError(f"bundle file {path} carries no digest")
    stored = doc.pop("digest")
    actual = sha256_hex(canonical_json(doc))
    if stored != actual:
        raise BundleIntegrityError(
            f"bundle digest mismatch for {path}: stored {stored[:12]}…, "
            f"recomputed {actual[:12]}… (file corrupted or edited)")
    return ModelBundle.from_dict(doc)
