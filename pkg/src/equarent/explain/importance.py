"""Global feature importance and attribution-driven feature pruning."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from equarent import _kernels
from equarent.casegen.dataset import EncodingMap
from equarent.explain.shap_values import BackgroundSet, forest_column_phi
from equarent.models.forest import RandomForest

DEFAULT_PRUNE_THRESHOLD = 1e-5


@dataclass(frozen=True)
class ImportanceEntry:
    feature_id: str
    mean_abs_phi: float
    share: float


@dataclass(frozen=True)
class ImportanceReport:
    """Per-feature mean |phi| over a dataset, descending, ties by id."""

    entries: tuple[ImportanceEntry, ...]

    def ordered_features(self) -> tuple[str, ...]:
        return tuple(e.feature_id for e in self.entries)

    def entry(self, feature_id: str) -> ImportanceEntry:
        for e in self.entries:
            if e.feature_id == feature_id:
                return e
        raise KeyError(feature_id)

    def to_dict(self) -> dict:
        return {"entries": [
            {"feature": e.feature_id, "mean_abs_phi": e.mean_abs_phi, "share": e.share}
            for e in self.entries
        ]}

    @classmethod
    def from_dict(cls, d: dict) -> "ImportanceReport":
        return cls(entries=tuple(
            ImportanceEntry(e["feature"], float(e["mean_abs_phi"]), float(e["share"]))
            for e in d["entries"]
        ))


@dataclass(frozen=True)
class PruneResult:
    kept: tuple[str, ...]
    dropped: tuple[str, ...]
    threshold: float


def global_importance(forest: RandomForest, X: np.ndarray,
                      background: BackgroundSet,
                      encoding: EncodingMap) -> ImportanceReport:
    """Mean absolute raw-feature attribution over the rows of X."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[0] == 0:
        raise ValueError("need at least one row to rank features")
    wtable = _kernels.shapley_weight_table(forest.n_features)
    feature_ids = encoding.feature_ids()
    index_groups = [encoding.column_indices(fid) for fid in feature_ids]
    totals = np.zeros(len(feature_ids), dtype=np.float64)
    for row in X:
        column_phi = forest_column_phi(forest, row, background, wtable)
        for j, idx in enumerate(index_groups):
            totals[j] += abs(float(np.sum(column_phi[idx])))
    means = totals / X.shape[0]
    total = float(np.sum(means))
    shares = means / total if total > 0 else np.zeros_like(means)
    order = sorted(range(len(feature_ids)),
                   key=lambda j: (-means[j], feature_ids[j]))
    return ImportanceReport(entries=tuple(
        ImportanceEntry(feature_ids[j], float(means[j]), float(shares[j]))
        for j in order
    ))


def prune_features(report: ImportanceReport,
                   threshold: float = DEFAULT_PRUNE_THRESHOLD) -> PruneResult:
    """Split features into kept (mean |phi| >= threshold) and dropped."""
    if threshold < 0:
        raise ValueError("threshold must be nonnegative")
    kept = tuple(e.feature_id for e in report.entries if e.mean_abs_phi >= threshold)
    dropped = tuple(e.feature_id for e in report.entries if e.mean_abs_phi < threshold)
    if not kept:
        raise ValueError("pruning would drop every feature; lower the threshold")
    return PruneResult(kept=kept, dropped=dropped, threshold=threshold)


def project_encoding(encoding: EncodingMap, kept: tuple[str, ...]) -> EncodingMap:
    """Encoding restricted to kept features, original column order."""
    kept_set = set(kept)
    unknown = kept_set - set(encoding.feature_ids())
    if unknown:
        raise ValueError(f"unknown features in kept list: {sorted(unknown)}")
    columns = tuple(c for c in encoding.columns if c.feature_id in kept_set)
    return EncodingMap(schema_digest=encoding.schema_digest, columns=columns)


def project_matrix(X: np.ndarray, encoding: EncodingMap,
                   kept: tuple[str, ...]) -> tuple[np.ndarray, EncodingMap]:
    """Columns of X for kept features plus the matching reduced encoding."""
    reduced = project_encoding(encoding, kept)
    kept_set = set(kept)
    cols = [i for i, c in enumerate(encoding.columns) if c.feature_id in kept_set]
    return np.ascontiguousarray(np.asarray(X, dtype=np.float64)[:, cols]), reduced
