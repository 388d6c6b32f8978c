"""Canonical model serialization and content digests.

Floats round-trip exactly (shortest-repr JSON), so a digest identifies
a model bit for bit.
"""

from __future__ import annotations

import numpy as np

from equarent.casegen.schema import canonical_json, sha256_hex
from equarent.models.baselines import ConstantModel, LinearModel
from equarent.models.forest import RandomForest
from equarent.models.mlp import MLP
from equarent.models.tree import DecisionTree


def model_to_dict(model) -> dict:
    if isinstance(model, ConstantModel):
        d = {"kind": "constant", "value": model.value}
        if model.sweep_grid is not None:
            d["sweep_grid"] = list(model.sweep_grid)
            d["sweep_mae"] = list(model.sweep_mae)
        return d
    if isinstance(model, LinearModel):
        return {"kind": "linear", "weights": model.weights.tolist(),
                "intercept": model.intercept}
    if isinstance(model, DecisionTree):
        return {"kind": "tree", **model.to_dict()}
    if isinstance(model, RandomForest):
        return {"kind": "forest", **model.to_dict()}
    if isinstance(model, MLP):
        return {"kind": "mlp", **model.to_dict()}
    raise TypeError(f"unknown model type {type(model).__name__}")


def model_from_dict(d: dict):
    kind = d.get("kind")
    if kind == "constant":
        return ConstantModel(
            value=float(d["value"]),
            sweep_grid=tuple(d["sweep_grid"]) if "sweep_grid" in d else None,
            sweep_mae=tuple(d["sweep_mae"]) if "sweep_mae" in d else None,
        )
    if kind == "linear":
        return LinearModel(weights=np.asarray(d["weights"], dtype=np.float64),
                           intercept=float(d["intercept"]))
    if kind == "tree":
        return DecisionTree.from_dict(d)
    if kind == "forest":
        return RandomForest.from_dict(d)
    if kind == "mlp":
        return MLP.from_dict(d)
    raise ValueError(f"unknown model kind {kind!r}")


def model_digest(model) -> str:
    return sha256_hex(canonical_json(model_to_dict(model)))
