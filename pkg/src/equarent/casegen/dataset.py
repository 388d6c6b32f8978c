"""Encoded datasets: labels, one-hot encoding, label-file ingestion."""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from equarent.casegen.schema import (
    CaseRecord,
    FeatureSchema,
    canonical_json,
    sha256_hex,
)

LABEL_FLOOR = 0.05


@dataclass(frozen=True)
class ReductionLabel:
    """Judged outcome: not ordered (0) or a fraction in [0.05, 1]."""

    ordered: bool
    reduction_pct: float

    def __post_init__(self):
        if not self.ordered and self.reduction_pct != 0.0:
            raise ValueError("reduction_pct must be 0 when not ordered")
        if self.ordered and not (LABEL_FLOOR <= self.reduction_pct <= 1.0):
            raise ValueError(
                f"ordered reduction must lie in [{LABEL_FLOOR}, 1.0], "
                f"got {self.reduction_pct}"
            )

    @property
    def value(self) -> float:
        return self.reduction_pct if self.ordered else 0.0


@dataclass(frozen=True)
class EncodedColumn:
    """One column of the encoded matrix; category set for one-hot columns."""

    feature_id: str
    category: str | None = None

    @property
    def name(self) -> str:
        if self.category is None:
            return self.feature_id
        return f"{self.feature_id}={self.category}"


@dataclass(frozen=True)
class EncodingMap:
    """Stable case -> vector mapping derived from the schema order."""

    schema_digest: str
    columns: tuple[EncodedColumn, ...]

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.columns)

    @property
    def width(self) -> int:
        return len(self.columns)

    def column_indices(self, feature_id: str) -> list[int]:
        return [i for i, c in enumerate(self.columns) if c.feature_id == feature_id]

    def feature_ids(self) -> tuple[str, ...]:
        seen: list[str] = []
        for c in self.columns:
            if c.feature_id not in seen:
                seen.append(c.feature_id)
        return tuple(seen)

    def to_dict(self) -> dict:
        return {
            "schema_digest": self.schema_digest,
            "columns": [
                {"feature_id": c.feature_id, "category": c.category}
                for c in self.columns
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EncodingMap":
        return cls(
            schema_digest=d["schema_digest"],
            columns=tuple(EncodedColumn(c["feature_id"], c["category"])
                          for c in d["columns"]),
        )


def build_encoding(schema: FeatureSchema) -> EncodingMap:
    """Column layout in schema order: one-hot per category, else one column."""
    columns: list[EncodedColumn] = []
    for spec in schema.features:
        if spec.kind == "categorical":
            columns.extend(EncodedColumn(spec.id, cat) for cat in spec.categories)
        else:
            columns.append(EncodedColumn(spec.id))
    return EncodingMap(schema_digest=schema.digest(), columns=tuple(columns))


def encode(schema: FeatureSchema, case: CaseRecord,
           encoding: EncodingMap | None = None) -> np.ndarray:
    """Fixed-order numeric vector for one case.

    Numerics pass through, booleans become 0/1, categoricals expand to
    one-hot sub-vectors in category order.
    """
    encoding = encoding or build_encoding(schema)
    out = np.zeros(encoding.width, dtype=np.float64)
    for i, col in enumerate(encoding.columns):
        spec = schema.feature(col.feature_id)
        value = case.values[col.feature_id]
        if col.category is not None:
            if value not in spec.categories:
                raise ValueError(f"{spec.id}: unknown category {value!r}")
            out[i] = 1.0 if value == col.category else 0.0
        elif spec.kind == "boolean":
            out[i] = 1.0 if value else 0.0
        else:
            out[i] = float(value)
    return out


def decode(schema: FeatureSchema, vector: np.ndarray,
           encoding: EncodingMap) -> dict[str, object]:
    """Inverse of :func:`encode` (categoricals via argmax of their block)."""
    values: dict[str, object] = {}
    i = 0
    while i < encoding.width:
        col = encoding.columns[i]
        spec = schema.feature(col.feature_id)
        if spec.kind == "categorical":
            block = encoding.column_indices(spec.id)
            sub = np.asarray([vector[j] for j in block])
            values[spec.id] = spec.categories[int(np.argmax(sub))]
            i = block[-1] + 1
        elif spec.kind == "boolean":
            values[spec.id] = bool(vector[i] > 0.5)
            i += 1
        elif spec.kind == "integer":
            values[spec.id] = int(round(float(vector[i])))
            i += 1
        else:
            values[spec.id] = float(vector[i])
            i += 1
    return values


@dataclass(frozen=True)
class Dataset:
    """Labeled cases plus the encoding that turns them into a matrix."""

    schema_version: str
    schema_digest: str
    encoding: EncodingMap
    rows: tuple[tuple[CaseRecord, ReductionLabel], ...]
    n_unlabeled: int = 0

    def __len__(self) -> int:
        return len(self.rows)

    def matrix(self, schema: FeatureSchema) -> tuple[np.ndarray, np.ndarray]:
        """Encoded ``(X, y)`` in row order."""
        if not self.rows:
            return (np.zeros((0, self.encoding.width)), np.zeros(0))
        X = np.stack([encode(schema, case, self.encoding) for case, _ in self.rows])
        y = np.asarray([label.value for _, label in self.rows], dtype=np.float64)
        return np.ascontiguousarray(X), y

    def project(self, kept: Sequence[str]) -> "Dataset":
        """Same rows, encoding restricted to the kept raw features.

        The raw case values are preserved; only the matrix view
        narrows, so a projected dataset still validates and renders.
        """
        kept_set = set(kept)
        unknown = kept_set - set(self.encoding.feature_ids())
        if unknown:
            raise ValueError(f"unknown features in kept list: {sorted(unknown)}")
        columns = tuple(c for c in self.encoding.columns if c.feature_id in kept_set)
        if not columns:
            raise ValueError("projection keeps no encoded columns")
        return replace(self, encoding=EncodingMap(
            schema_digest=self.encoding.schema_digest, columns=columns))

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "schema_digest": self.schema_digest,
            "encoding": self.encoding.to_dict(),
            "n_unlabeled": self.n_unlabeled,
            "rows": [
                {
                    "case_id": case.case_id,
                    "values": dict(case.values),
                    "ordered": label.ordered,
                    "reduction_pct": label.reduction_pct,
                }
                for case, label in self.rows
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Dataset":
        rows = tuple(
            (CaseRecord(r["case_id"], r["values"]),
             ReductionLabel(r["ordered"], r["reduction_pct"]))
            for r in d["rows"]
        )
        return cls(
            schema_version=d["schema_version"],
            schema_digest=d["schema_digest"],
            encoding=EncodingMap.from_dict(d["encoding"]),
            rows=rows,
            n_unlabeled=d.get("n_unlabeled", 0),
        )

    def digest(self) -> str:
        return sha256_hex(canonical_json(self.to_dict()))


LabelRow = tuple[str, bool, float]


def read_label_file(path: str | Path) -> list[LabelRow]:
    """Parse the delimited label format: case_id, ordered (0/1), fraction."""
    out: list[LabelRow] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        for line, row in enumerate(reader, start=2):
            try:
                out.append((row["case_id"], row["ordered"].strip() in ("1", "true", "True"),
                            float(row["reduction_pct"])))
            except (KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"{path}:{line}: malformed label row") from exc
    return out


def write_label_file(path: str | Path, labels: Iterable[tuple[str, ReductionLabel]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["case_id", "ordered", "reduction_pct"])
        for case_id, label in labels:
            writer.writerow([case_id, int(label.ordered), repr(label.reduction_pct)])


def ingest_labels(
    schema: FeatureSchema,
    cases: Sequence[CaseRecord],
    labels: str | Path | Iterable[LabelRow],
) -> Dataset:
    """Join cases with their labels; unlabeled cases are dropped and counted.

    Duplicate labels for a case resolve last-write-wins with a warning;
    unknown case ids and out-of-domain fractions are errors.
    """
    if isinstance(labels, (str, Path)):
        label_rows = read_label_file(labels)
    else:
        label_rows = list(labels)
    by_id = {c.case_id: c for c in cases}
    chosen: dict[str, ReductionLabel] = {}
    for row in label_rows:
        if len(row) == 2 and isinstance(row[1], ReductionLabel):
            case_id, label = row
        else:
            case_id, ordered, pct = row
            label = ReductionLabel(ordered=ordered, reduction_pct=pct)
        if case_id not in by_id:
            raise ValueError(f"label references unknown case_id {case_id!r}")
        if case_id in chosen:
            warnings.warn(f"duplicate label for {case_id}; keeping the last one",
                          stacklevel=2)
        chosen[case_id] = label
    if not chosen:
        warnings.warn("label input is empty; dataset has no rows", stacklevel=2)
    rows = tuple((case, chosen[case.case_id]) for case in cases
                 if case.case_id in chosen)
    return Dataset(
        schema_version=schema.version,
        schema_digest=schema.digest(),
        encoding=build_encoding(schema),
        rows=rows,
        n_unlabeled=len(cases) - len(rows),
    )
