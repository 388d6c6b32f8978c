"""Feature schema: specs, constraints, validation, and digests.

The schema is data-driven: a YAML document declares the 25 case fields,
their sampling distributions, the inter-feature constraints, and the
deed template.  Everything downstream (sampling, encoding, rendering,
the service form) is derived from it.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

import numpy as np
import yaml

KINDS = ("numeric", "integer", "percent", "boolean", "categorical")
RANGED_KINDS = ("numeric", "integer", "percent")

_WEIGHT_TOL = 1e-9


class SchemaError(ValueError):
    """Malformed or inconsistent schema document.

    Carries every violation found, not just the first.
    """

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__(
            "invalid schema: " + "; ".join(self.violations)
        )


@dataclass(frozen=True)
class Violation:
    """One failed validation check, identified by constraint or field id."""

    id: str
    message: str


@dataclass(frozen=True)
class FeatureSpec:
    """Declaration of a single case field."""

    id: str
    display_name: str
    kind: str
    section: str = "case"
    unit: str | None = None
    range: tuple[float, float] | None = None
    step: float | None = None
    categories: tuple[str, ...] | None = None
    weights: tuple[float, ...] | None = None
    values: tuple[float, ...] | None = None
    p_true: float = 0.5
    render: Mapping[Any, str] = field(default_factory=dict)

    def render_value(self, value: Any) -> str:
        """Deed text for *value* (unit-aware, Italian number style)."""
        from equarent.casegen.documents import format_value

        return format_value(self, value)

    def check_value(self, value: Any) -> list[Violation]:
        """Kind, range, and category checks for one value."""
        out: list[Violation] = []
        fid = self.id
        if self.kind == "boolean":
            if not isinstance(value, (bool, np.bool_)):
                out.append(Violation(f"{fid}.type", f"{fid}: expected boolean, got {value!r}"))
        elif self.kind == "categorical":
            if not isinstance(value, str):
                out.append(Violation(f"{fid}.type", f"{fid}: expected category name, got {value!r}"))
            elif value not in (self.categories or ()):
                out.append(Violation(f"{fid}.category", f"{fid}: unknown category {value!r}"))
        elif self.kind == "integer":
            if isinstance(value, (bool, np.bool_)) or not isinstance(value, (int, np.integer)):
                out.append(Violation(f"{fid}.type", f"{fid}: expected integer, got {value!r}"))
            elif self.range is not None and not (self.range[0] <= value <= self.range[1]):
                out.append(Violation(f"{fid}.range", f"{fid}: {value!r} outside [{self.range[0]}, {self.range[1]}]"))
        else:  # numeric / percent
            if isinstance(value, (bool, np.bool_)) or not isinstance(value, (int, float, np.integer, np.floating)):
                out.append(Violation(f"{fid}.type", f"{fid}: expected number, got {value!r}"))
            elif not np.isfinite(float(value)):
                out.append(Violation(f"{fid}.type", f"{fid}: non-finite value"))
            elif self.range is not None and not (self.range[0] <= float(value) <= self.range[1]):
                out.append(Violation(f"{fid}.range", f"{fid}: {value!r} outside [{self.range[0]}, {self.range[1]}]"))
        return out


@dataclass(frozen=True)
class Constraint:
    """Inter-feature constraint checked on every case.

    Kinds:

    * ``range_bound`` -- strict or inclusive bounds on one feature
      (``gt``/``ge``/``lt``/``le``).
    * ``implication`` -- if ``when`` holds, ``then`` must hold; both
      sides compare a feature against a literal (``equals``/``gt``).
    * ``arithmetic`` -- ``left op scale*right`` between two features,
      optionally guarded by a ``when`` condition.
    """

    id: str
    kind: str
    params: Mapping[str, Any]

    def referenced_features(self) -> set[str]:
        p = self.params
        refs: set[str] = set()
        if self.kind == "range_bound":
            refs.add(p["feature"])
        elif self.kind == "implication":
            refs.add(p["when"]["feature"])
            refs.add(p["then"]["feature"])
        elif self.kind == "arithmetic":
            refs.add(p["left"])
            refs.add(p["right"])
            if "when" in p:
                refs.add(p["when"]["feature"])
        return refs

    def holds(self, values: Mapping[str, Any]) -> bool:
        p = self.params
        if self.kind == "range_bound":
            v = values[p["feature"]]
            if "gt" in p and not v > p["gt"]:
                return False
            if "ge" in p and not v >= p["ge"]:
                return False
            if "lt" in p and not v < p["lt"]:
                return False
            if "le" in p and not v <= p["le"]:
                return False
            return True
        if self.kind == "implication":
            if not _condition_holds(p["when"], values):
                return True
            return _condition_holds(p["then"], values)
        if self.kind == "arithmetic":
            if "when" in p and not _condition_holds(p["when"], values):
                return True
            left = values[p["left"]]
            right = values[p["right"]] * p.get("scale", 1)
            op = p.get("op", "eq")
            if op == "eq":
                return left == right
            if op == "le":
                return left <= right
            if op == "ge":
                return left >= right
            if op == "lt":
                return left < right
            if op == "gt":
                return left > right
            raise ValueError(f"unknown arithmetic op {op!r}")
        raise ValueError(f"unknown constraint kind {self.kind!r}")

    def describe(self) -> str:
        p = self.params
        if self.kind == "range_bound":
            parts = [f"{op} {p[op]}" for op in ("gt", "ge", "lt", "le") if op in p]
            return f"{p['feature']} must be " + " and ".join(parts)
        if self.kind == "implication":
            return (f"if {_describe_condition(p['when'])} "
                    f"then {_describe_condition(p['then'])}")
        if self.kind == "arithmetic":
            scale = p.get("scale", 1)
            rhs = p["right"] if scale == 1 else f"{scale} x {p['right']}"
            clause = f"{p['left']} {p.get('op', 'eq')} {rhs}"
            if "when" in p:
                clause += f" when {_describe_condition(p['when'])}"
            return clause
        return self.id


def _condition_holds(cond: Mapping[str, Any], values: Mapping[str, Any]) -> bool:
    v = values[cond["feature"]]
    if "equals" in cond:
        return v == cond["equals"]
    if "gt" in cond:
        return v > cond["gt"]
    if "ge" in cond:
        return v >= cond["ge"]
    if "in" in cond:
        return v in cond["in"]
    raise ValueError(f"condition needs one of equals/gt/ge/in: {cond!r}")


def _describe_condition(cond: Mapping[str, Any]) -> str:
    f = cond["feature"]
    if "equals" in cond:
        return f"{f} = {cond['equals']}"
    if "gt" in cond:
        return f"{f} > {cond['gt']}"
    if "ge" in cond:
        return f"{f} >= {cond['ge']}"
    return f"{f} in {cond['in']}"


@dataclass(frozen=True)
class CaseRecord:
    """One synthetic case: an id plus a value for every schema feature."""

    case_id: str
    values: Mapping[str, Any]

    def replace_value(self, feature_id: str, value: Any, case_id: str | None = None) -> "CaseRecord":
        values = dict(self.values)
        values[feature_id] = value
        return CaseRecord(case_id=case_id or self.case_id, values=values)


@dataclass(frozen=True)
class FeatureSchema:
    """Ordered feature specs + constraints + deed template."""

    version: str
    features: tuple[FeatureSpec, ...]
    constraints: tuple[Constraint, ...]
    document_template: str

    def __post_init__(self):
        object.__setattr__(self, "_by_id", {f.id: f for f in self.features})

    @property
    def feature_ids(self) -> tuple[str, ...]:
        return tuple(f.id for f in self.features)

    def feature(self, feature_id: str) -> FeatureSpec:
        try:
            return self._by_id[feature_id]
        except KeyError:
            raise KeyError(f"unknown feature {feature_id!r}") from None

    def digest(self) -> str:
        """Content digest of the schema (hex sha256 of canonical form)."""
        return sha256_hex(canonical_json(self.to_dict()))

    def to_dict(self) -> dict:
        feats = []
        for f in self.features:
            d: dict[str, Any] = {
                "id": f.id,
                "display_name": f.display_name,
                "kind": f.kind,
                "section": f.section,
            }
            if f.unit is not None:
                d["unit"] = f.unit
            if f.range is not None:
                d["range"] = list(f.range)
            if f.step is not None:
                d["step"] = f.step
            if f.categories is not None:
                d["categories"] = list(f.categories)
                d["weights"] = list(f.weights or ())
            if f.values is not None:
                d["values"] = list(f.values)
                d["weights"] = list(f.weights or ())
            if f.kind == "boolean":
                d["p_true"] = f.p_true
            if f.render:
                d["render"] = {str(k).lower() if isinstance(k, bool) else k: v
                               for k, v in f.render.items()}
            feats.append(d)
        cons = [{"id": c.id, "kind": c.kind, **_plain(c.params)} for c in self.constraints]
        return {
            "version": self.version,
            "features": feats,
            "constraints": cons,
            "document_template": self.document_template,
        }


def _plain(obj: Any) -> Any:
    if isinstance(obj, Mapping):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj


def canonical_json(obj: Any) -> bytes:
    """Stable byte serialization used for every content digest."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"),
                      allow_nan=False).encode("utf-8")


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def default_schema_path() -> Path:
    return Path(str(resources.files("equarent.casegen") / "data" / "default_schema.yaml"))


def load_schema(source: str | Path | Mapping[str, Any] | None = None) -> FeatureSchema:
    """Load and validate a schema document (default: the shipped schema).

    Raises :class:`SchemaError` listing every violation found, or
    ``yaml.YAMLError`` for unparseable documents.
    """
    if source is None:
        source = default_schema_path()
    if isinstance(source, Mapping):
        doc = dict(source)
    else:
        text = Path(source).read_text(encoding="utf-8")
        doc = yaml.safe_load(text)
    if not isinstance(doc, Mapping):
        raise SchemaError(["document root must be a mapping"])

    problems: list[str] = []
    features: list[FeatureSpec] = []
    seen_ids: set[str] = set()
    for raw in doc.get("features", []):
        fid = raw.get("id", "<missing id>")
        if fid in seen_ids:
            problems.append(f"duplicate feature id {fid!r}")
        seen_ids.add(fid)
        kind = raw.get("kind")
        if kind not in KINDS:
            problems.append(f"{fid}: unknown kind {kind!r}")
            continue
        rng = tuple(raw["range"]) if "range" in raw else None
        if kind in RANGED_KINDS:
            if rng is None:
                problems.append(f"{fid}: {kind} feature needs a range")
            elif not rng[0] < rng[1]:
                problems.append(f"{fid}: range lo {rng[0]} not below hi {rng[1]}")
            elif kind == "percent" and not (0 <= rng[0] and rng[1] <= 1):
                problems.append(f"{fid}: percent range must lie within [0, 1]")
        weights = tuple(raw["weights"]) if "weights" in raw else None
        if kind == "categorical":
            cats = tuple(raw.get("categories", ()))
            if len(cats) < 1:
                problems.append(f"{fid}: categorical feature needs categories")
            if weights is None or len(weights) != len(cats):
                problems.append(f"{fid}: needs one weight per category")
            else:
                _check_weights(fid, weights, problems)
        elif "values" in raw:
            vals = tuple(raw["values"])
            if weights is None or len(weights) != len(vals):
                problems.append(f"{fid}: needs one weight per declared value")
            else:
                _check_weights(fid, weights, problems)
            if rng is not None and vals and not all(rng[0] <= v <= rng[1] for v in vals):
                problems.append(f"{fid}: declared values fall outside the range")
        render = raw.get("render", {})
        if kind == "boolean":
            render = {_as_bool_key(k): v for k, v in render.items()}
        features.append(FeatureSpec(
            id=fid,
            display_name=raw.get("display_name", fid),
            kind=kind,
            section=raw.get("section", "case"),
            unit=raw.get("unit"),
            range=rng,
            step=raw.get("step"),
            categories=tuple(raw["categories"]) if "categories" in raw else None,
            weights=weights,
            values=tuple(raw["values"]) if "values" in raw else None,
            p_true=float(raw.get("p_true", 0.5)),
            render=render,
        ))

    constraints: list[Constraint] = []
    for raw in doc.get("constraints", []):
        cid = raw.get("id", "<missing id>")
        kind = raw.get("kind")
        if kind not in ("range_bound", "implication", "arithmetic"):
            problems.append(f"constraint {cid}: unknown kind {kind!r}")
            continue
        params = {k: v for k, v in raw.items() if k not in ("id", "kind")}
        c = Constraint(id=cid, kind=kind, params=params)
        for ref in c.referenced_features():
            if ref not in seen_ids:
                problems.append(f"constraint {cid}: references undefined feature {ref!r}")
        constraints.append(c)

    template = doc.get("document_template", "")
    for placeholder in _template_placeholders(template):
        if placeholder not in seen_ids:
            problems.append(f"template placeholder {{{placeholder}}} resolves to no feature")

    if problems:
        raise SchemaError(problems)
    return FeatureSchema(
        version=str(doc.get("version", "1")),
        features=tuple(features),
        constraints=tuple(constraints),
        document_template=template,
    )


def _as_bool_key(key: Any) -> bool:
    if isinstance(key, bool):
        return key
    return str(key).strip().lower() == "true"


def _check_weights(fid: str, weights: tuple[float, ...], problems: list[str]) -> None:
    if any(w < 0 for w in weights):
        problems.append(f"{fid}: negative sampling weight")
    total = float(np.sum(np.asarray(weights, dtype=float)))
    if abs(total - 1.0) > _WEIGHT_TOL:
        problems.append(f"{fid}: weights sum {total:g}")


def _template_placeholders(template: str) -> list[str]:
    import string

    return [name for _, name, _, _ in string.Formatter().parse(template)
            if name is not None and name != ""]


def validate_case(schema: FeatureSchema, case: CaseRecord) -> list[Violation]:
    """Full validation report for one case; empty iff the case is valid.

    Violations carry the offending constraint id (or ``feature.check``
    for kind/range problems); they are data, not exceptions.
    """
    out: list[Violation] = []
    values = case.values
    for spec in schema.features:
        if spec.id not in values:
            out.append(Violation(f"{spec.id}.missing", f"{spec.id}: value missing"))
            continue
        out.extend(spec.check_value(values[spec.id]))
    known = set(schema.feature_ids)
    for key in values:
        if key not in known:
            out.append(Violation(f"{key}.unknown", f"{key}: not a schema feature"))
    if any(v.id.endswith(".missing") or v.id.endswith(".type") for v in out):
        return out  # constraints would raise on missing/mistyped operands
    for c in schema.constraints:
        try:
            ok = c.holds(values)
        except (KeyError, TypeError):
            ok = False
        if not ok:
            out.append(Violation(c.id, c.describe()))
    return out
