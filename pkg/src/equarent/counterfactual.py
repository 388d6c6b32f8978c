"""Brute-force single-feature counterfactual search.

Answers "what single change to this case would move the decision?" by
exhaustively scoring every candidate value of one feature at a time,
keeping only candidates that remain schema-valid, and returning the
qualifying change of minimal normalized distance.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from equarent.casegen.dataset import EncodingMap, build_encoding, encode
from equarent.casegen.schema import CaseRecord, FeatureSchema, FeatureSpec, validate_case

DEFAULT_DELTA = 0.10
DEFAULT_GRID_POINTS = 101
TARGET_KINDS = ("change", "reach")
DIRECTIONS = ("up", "down", "any")
# Fraction of the feature range under which a float candidate counts as
# "same value as the instance" and is excluded from the grid.
_SAME_VALUE_RTOL = 1e-9


class SearchError(ValueError):
    """Raised for unknown features or when no feasible candidate exists."""


@dataclass(frozen=True)
class Target:
    """Condition the counterfactual prediction must satisfy.

    ``change``: prediction moves by at least ``delta`` in ``direction``.
    ``reach``: prediction lands within ``tol`` of ``value``.
    """

    kind: str = "change"
    delta: float = DEFAULT_DELTA
    direction: str = "any"
    value: float | None = None
    tol: float = 0.0

    def __post_init__(self):
        if self.kind not in TARGET_KINDS:
            raise ValueError(f"unknown target kind {self.kind!r}")
        if self.kind == "change":
            if not self.delta > 0:
                raise ValueError("change target requires delta > 0")
            if self.direction not in DIRECTIONS:
                raise ValueError(f"unknown direction {self.direction!r}")
        else:
            if self.value is None:
                raise ValueError("reach target requires a value")
            if self.tol < 0:
                raise ValueError("reach target requires tol >= 0")

    def satisfied(self, original: float, candidate: float) -> bool:
        if self.kind == "change":
            if self.direction == "up":
                return candidate - original >= self.delta
            if self.direction == "down":
                return original - candidate >= self.delta
            return abs(candidate - original) >= self.delta
        return abs(candidate - self.value) <= self.tol

    def describe(self) -> str:
        if self.kind == "change":
            arrow = {"up": "increases", "down": "decreases", "any": "changes"}
            return f"prediction {arrow[self.direction]} by at least {self.delta}"
        return f"prediction reaches {self.value} within {self.tol}"

    def to_dict(self) -> dict:
        if self.kind == "change":
            return {"kind": "change", "delta": self.delta, "direction": self.direction}
        return {"kind": "reach", "value": self.value, "tol": self.tol}

    @classmethod
    def from_dict(cls, d: dict) -> "Target":
        if d.get("kind", "change") == "reach":
            return cls(kind="reach", value=float(d["value"]),
                       tol=float(d.get("tol", 0.0)))
        return cls(kind="change", delta=float(d.get("delta", DEFAULT_DELTA)),
                   direction=str(d.get("direction", "any")))


@dataclass(frozen=True)
class GridSpec:
    """Candidate counts for continuously valued kinds.

    Categorical features always enumerate every category, booleans both
    truth values, integers every whole number in range.
    """

    numeric_points: int = DEFAULT_GRID_POINTS
    percent_points: int = DEFAULT_GRID_POINTS

    def __post_init__(self):
        if self.numeric_points < 2 or self.percent_points < 2:
            raise ValueError("grids need at least two points")


@dataclass(frozen=True)
class CounterfactualQuery:
    instance: CaseRecord
    actionable: tuple[str, ...]
    target: Target = field(default_factory=Target)
    grid: GridSpec = field(default_factory=GridSpec)


@dataclass(frozen=True)
class CounterfactualResult:
    feature_id: str
    original_value: Any
    counterfactual_value: Any
    original_prediction: float
    counterfactual_prediction: float
    distance: float

    def to_dict(self) -> dict:
        return {
            "feature": self.feature_id,
            "original_value": self.original_value,
            "counterfactual_value": self.counterfactual_value,
            "original_prediction": self.original_prediction,
            "counterfactual_prediction": self.counterfactual_prediction,
            "distance": self.distance,
        }


@dataclass(frozen=True)
class TopKEntry:
    """Outcome of one per-feature search inside a top-k batch."""

    feature_id: str
    status: str  # "found" | "not_found" | "error"
    result: Optional[CounterfactualResult] = None
    message: str | None = None

    def to_dict(self) -> dict:
        return {
            "feature": self.feature_id,
            "status": self.status,
            "result": self.result.to_dict() if self.result else None,
            "message": self.message,
        }


def build_grid(spec: FeatureSpec, grid: GridSpec | None = None) -> list:
    """All candidate values for one feature, in ascending order."""
    grid = grid or GridSpec()
    if spec.kind == "categorical":
        return list(spec.categories)
    if spec.kind == "boolean":
        return [False, True]
    lo, hi = spec.range
    if spec.kind == "integer":
        return [int(v) for v in range(int(lo), int(hi) + 1)]
    points = grid.percent_points if spec.kind == "percent" else grid.numeric_points
    return [float(v) for v in np.linspace(lo, hi, points)]


def _is_original(spec: FeatureSpec, candidate, original) -> bool:
    if spec.kind in ("categorical", "boolean"):
        return candidate == original
    lo, hi = spec.range
    return abs(float(candidate) - float(original)) <= _SAME_VALUE_RTOL * (hi - lo)


def candidate_distance(spec: FeatureSpec, original, candidate) -> float:
    """Range-normalized |change|; any categorical/boolean change costs 1."""
    if spec.kind in ("categorical", "boolean"):
        return 1.0
    lo, hi = spec.range
    return abs(float(candidate) - float(original)) / (hi - lo)


def _order_key(spec: FeatureSpec, value) -> float:
    """'Smaller value' for tie-breaking: numeric order, or declared
    category order, with False before True."""
    if spec.kind == "categorical":
        return float(spec.categories.index(value))
    if spec.kind == "boolean":
        return 0.0 if not value else 1.0
    return float(value)


def search_single_feature(model, schema: FeatureSchema, case: CaseRecord,
                          feature_id: str, target: Target | None = None,
                          grid: GridSpec | None = None,
                          encoding: EncodingMap | None = None,
                          ) -> Optional[CounterfactualResult]:
    """Best single-feature change meeting the target, or None.

    Exhaustive over the candidate grid; schema-invalid candidates are
    discarded; among qualifying candidates the minimal normalized
    distance wins, ties toward the smaller value.
    """
    try:
        spec = schema.feature(feature_id)
    except KeyError:
        raise SearchError(f"unknown feature: {feature_id}") from None
    target = target or Target()
    original_value = case.values[feature_id]
    candidates = [v for v in build_grid(spec, grid)
                  if not _is_original(spec, v, original_value)]
    feasible: list[tuple[Any, CaseRecord]] = []
    for v in candidates:
        cand = case.replace_value(feature_id, v)
        if not validate_case(schema, cand):
            feasible.append((v, cand))
    if not feasible:
        raise SearchError(
            f"empty feasible grid for {feature_id}: every candidate value "
            "violates a schema constraint")
    encoding = encoding or build_encoding(schema)
    X = np.stack([encode(schema, c, encoding) for _, c in feasible])
    preds = np.asarray(model.predict(X), dtype=np.float64)
    original_pred = float(np.asarray(
        model.predict(encode(schema, case, encoding)[None, :]))[0])
    qualifying = [
        (v, float(p)) for (v, _), p in zip(feasible, preds)
        if target.satisfied(original_pred, float(p))
    ]
    if not qualifying:
        return None
    value, pred = min(
        qualifying,
        key=lambda vp: (candidate_distance(spec, original_value, vp[0]),
                        _order_key(spec, vp[0])),
    )
    return CounterfactualResult(
        feature_id=feature_id,
        original_value=original_value,
        counterfactual_value=value,
        original_prediction=original_pred,
        counterfactual_prediction=pred,
        distance=candidate_distance(spec, original_value, value),
    )


def counterfactuals_for_top_k(model, schema: FeatureSchema, case: CaseRecord,
                              explanation, k: int = 3,
                              target: Target | None = None,
                              grid: GridSpec | None = None,
                              encoding: EncodingMap | None = None,
                              ) -> list[TopKEntry]:
    """One independent search per top-|phi| feature, importance order.

    Per-feature failures become error entries instead of aborting the
    batch; absent results become "no counterfactual found" entries.
    """
    entries: list[TopKEntry] = []
    for fid in explanation.top_features(k):
        try:
            result = search_single_feature(model, schema, case, fid,
                                           target=target, grid=grid,
                                           encoding=encoding)
        except SearchError as exc:
            entries.append(TopKEntry(feature_id=fid, status="error",
                                     message=str(exc)))
            continue
        if result is None:
            entries.append(TopKEntry(feature_id=fid, status="not_found",
                                     message=f"no counterfactual found: no single "
                                             f"change to {fid} meets the target"))
        else:
            entries.append(TopKEntry(feature_id=fid, status="found", result=result))
    return entries
