"""Labeling oracle: a configurable stand-in for the judging panel.

Real judged labels are unavailable, so tests and demos label cases with
a declared deterministic function of a feature subset plus bounded
noise.  The declared subset is part of the contract: features outside
it provably cannot move the label.

Two oracle shapes are supported: additive (a sum of per-feature terms)
and tree (a fixed decision tree whose leaves are raw scores).  Both
feed the same label protocol: clip to [0, 1], quantize to whole percent
points, floor below 5% to "not ordered".
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path
from typing import Any, Mapping, Union

import numpy as np
import yaml

from equarent.casegen.dataset import LABEL_FLOOR, ReductionLabel
from equarent.casegen.schema import CaseRecord, FeatureSchema

TRANSFORMS = ("linear", "step", "indicator", "category_scores")
CONDITION_OPS = ("ge", "eq", "in")


@dataclass(frozen=True)
class OracleTerm:
    """One additive term of the oracle's base function."""

    feature: str
    transform: str
    weight: float = 1.0
    normalize: tuple[float, float] | None = None  # linear: maps [lo, hi] -> [0, 1]
    threshold: float | None = None                # step: 1 iff value >= threshold
    value: Any = None                             # indicator: 1 iff value == this
    scores: Mapping[str, float] | None = None     # category_scores: per-category score

    def evaluate(self, values: Mapping[str, Any]) -> float:
        x = values[self.feature]
        if self.transform == "linear":
            lo, hi = self.normalize
            frac = (float(x) - lo) / (hi - lo)
            return self.weight * min(1.0, max(0.0, frac))
        if self.transform == "step":
            return self.weight if float(x) >= self.threshold else 0.0
        if self.transform == "indicator":
            return self.weight if x == self.value else 0.0
        if self.transform == "category_scores":
            return self.weight * float(self.scores.get(x, 0.0))
        raise ValueError(f"unknown transform {self.transform!r}")


@dataclass(frozen=True)
class OracleConfig:
    """Additive oracle: deterministic base function + bounded noise."""

    name: str
    intercept: float
    terms: tuple[OracleTerm, ...]
    noise_scale: float = 0.0

    @property
    def declared_features(self) -> tuple[str, ...]:
        seen: list[str] = []
        for t in self.terms:
            if t.feature not in seen:
                seen.append(t.feature)
        return tuple(seen)

    def raw_value(self, values: Mapping[str, Any]) -> float:
        return self.intercept + sum(t.evaluate(values) for t in self.terms)

    def with_noise(self, noise_scale: float) -> "OracleConfig":
        return replace(self, noise_scale=noise_scale)


@dataclass(frozen=True)
class OracleCondition:
    """A single branch test: value >= v, value == v, or value in v."""

    feature: str
    op: str
    value: Any

    def holds(self, values: Mapping[str, Any]) -> bool:
        x = values[self.feature]
        if self.op == "ge":
            return float(x) >= float(self.value)
        if self.op == "eq":
            return x == self.value
        if self.op == "in":
            return x in self.value
        raise ValueError(f"unknown condition op {self.op!r}")


@dataclass(frozen=True)
class OracleNode:
    """Internal node of a tree oracle; branches are nodes or leaf scores."""

    condition: OracleCondition
    then_branch: Union["OracleNode", float]
    else_branch: Union["OracleNode", float]


@dataclass(frozen=True)
class TreeOracle:
    """Tree oracle: a fixed decision tree over raw feature values.

    Every internal node consumes one feature; scores live at the
    leaves.  Used to make a label function whose live-feature set is
    exact by construction.
    """

    name: str
    root: OracleNode
    noise_scale: float = 0.0

    @property
    def declared_features(self) -> tuple[str, ...]:
        seen: list[str] = []

        def walk(node) -> None:
            if not isinstance(node, OracleNode):
                return
            if node.condition.feature not in seen:
                seen.append(node.condition.feature)
            walk(node.then_branch)
            walk(node.else_branch)

        walk(self.root)
        return tuple(seen)

    def raw_value(self, values: Mapping[str, Any]) -> float:
        node = self.root
        while isinstance(node, OracleNode):
            node = node.then_branch if node.condition.holds(values) else node.else_branch
        return float(node)

    def with_noise(self, noise_scale: float) -> "TreeOracle":
        return replace(self, noise_scale=noise_scale)


Oracle = Union[OracleConfig, TreeOracle]


def _case_stream(case_id: str, seed: int) -> np.random.Generator:
    """Independent noise stream per (case, seed)."""
    digest = hashlib.sha256(case_id.encode("utf-8")).digest()
    key = int.from_bytes(digest[:8], "big")
    return np.random.default_rng([seed, key])


def oracle_label(case: CaseRecord, oracle: Oracle, seed: int = 0) -> ReductionLabel:
    """Label one case: clipped score, floored into {0} | [0.05, 1].

    The fraction is quantized to whole percent points, mirroring a
    drop-down label protocol.
    """
    raw = oracle.raw_value(case.values)
    if oracle.noise_scale > 0.0:
        rng = _case_stream(case.case_id, seed)
        raw += rng.uniform(-oracle.noise_scale, oracle.noise_scale)
    clipped = min(1.0, max(0.0, raw))
    quantized = round(clipped, 2)
    if quantized < LABEL_FLOOR:
        return ReductionLabel(ordered=False, reduction_pct=0.0)
    return ReductionLabel(ordered=True, reduction_pct=quantized)


def label_cases(cases, oracle: Oracle, seed: int = 0) -> list[tuple[str, ReductionLabel]]:
    return [(c.case_id, oracle_label(c, oracle, seed)) for c in cases]


def _parse_tree_node(raw) -> Union[OracleNode, float]:
    if isinstance(raw, (int, float)) and not isinstance(raw, bool):
        return float(raw)
    if not isinstance(raw, Mapping):
        raise ValueError(f"tree oracle node must be a mapping or number, got {raw!r}")
    op = raw.get("op")
    if op not in CONDITION_OPS:
        raise ValueError(f"unknown condition op {op!r}")
    value = raw["value"]
    if op == "in":
        value = tuple(value)
    for branch in ("then", "else"):
        if branch not in raw:
            raise ValueError(f"tree oracle node missing {branch!r} branch")
    return OracleNode(
        condition=OracleCondition(feature=raw["feature"], op=op, value=value),
        then_branch=_parse_tree_node(raw["then"]),
        else_branch=_parse_tree_node(raw["else"]),
    )


def load_oracle(source: str | Path | Mapping[str, Any]) -> Oracle:
    """Load an oracle configuration from YAML or a mapping.

    Shipped presets resolve by bare name: ``oracle_default`` (additive,
    three features) and ``oracle_live21`` (tree, all but the four
    filler fields).
    """
    if isinstance(source, Mapping):
        doc = dict(source)
    else:
        path = Path(source)
        if not path.exists() and not path.suffix:
            path = Path(str(resources.files("equarent.casegen") / "data" / f"{path.name}.yaml"))
        doc = yaml.safe_load(path.read_text(encoding="utf-8"))
    name = str(doc.get("name", "oracle"))
    noise = float(doc.get("noise_scale", 0.0))
    if doc.get("kind", "additive") == "tree":
        root = _parse_tree_node(doc["root"])
        if not isinstance(root, OracleNode):
            raise ValueError("tree oracle root must be an internal node")
        return TreeOracle(name=name, root=root, noise_scale=noise)
    terms = []
    for raw in doc.get("terms", []):
        transform = raw.get("transform")
        if transform not in TRANSFORMS:
            raise ValueError(f"unknown oracle transform {transform!r}")
        terms.append(OracleTerm(
            feature=raw["feature"],
            transform=transform,
            weight=float(raw.get("weight", 1.0)),
            normalize=tuple(raw["normalize"]) if "normalize" in raw else None,
            threshold=raw.get("threshold"),
            value=raw.get("value"),
            scores=raw.get("scores"),
        ))
    return OracleConfig(
        name=name,
        intercept=float(doc.get("intercept", 0.0)),
        terms=tuple(terms),
        noise_scale=noise,
    )


def check_oracle(oracle: Oracle, schema: FeatureSchema) -> None:
    """Raise if the oracle references features missing from the schema."""
    known = set(schema.feature_ids)
    unknown = [f for f in oracle.declared_features if f not in known]
    if unknown:
        raise ValueError(f"oracle references unknown features: {sorted(set(unknown))}")
