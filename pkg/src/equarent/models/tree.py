"""CART regression trees over the shared kernel backends."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from equarent import _kernels

MIN_VARIANCE = 1e-15


@dataclass(frozen=True)
class DecisionTree:
    """Flat preorder node arrays; ``feature[i] < 0`` marks a leaf.

    ``value`` is the node's training-label mean, ``weight`` its
    (bootstrap-weighted) sample count.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    weight: np.ndarray
    n_features: int

    @property
    def n_nodes(self) -> int:
        return int(self.feature.shape[0])

    @property
    def n_leaves(self) -> int:
        return int(np.sum(self.feature < 0))

    def features_used(self) -> set[int]:
        return {int(f) for f in self.feature if f >= 0}

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.ascontiguousarray(np.atleast_2d(np.asarray(X, dtype=np.float64)))
        if X.shape[1] != self.n_features:
            raise ValueError(
                f"expected {self.n_features} columns, got {X.shape[1]}")
        kernel = _kernels.get_backend()
        return kernel.predict_tree(self.feature, self.threshold, self.left,
                                   self.right, self.value, X)

    def to_dict(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
            "weight": self.weight.tolist(),
            "n_features": self.n_features,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DecisionTree":
        return cls(
            feature=np.asarray(d["feature"], dtype=np.int32),
            threshold=np.asarray(d["threshold"], dtype=np.float64),
            left=np.asarray(d["left"], dtype=np.int32),
            right=np.asarray(d["right"], dtype=np.int32),
            value=np.asarray(d["value"], dtype=np.float64),
            weight=np.asarray(d["weight"], dtype=np.float64),
            n_features=int(d["n_features"]),
        )


def _check_training_inputs(X: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    X = np.ascontiguousarray(np.atleast_2d(np.asarray(X, dtype=np.float64)))
    y = np.ascontiguousarray(np.asarray(y, dtype=np.float64))
    if X.shape[0] != y.shape[0] or y.size == 0:
        raise ValueError("X and y must have matching nonzero length")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise ValueError("non-finite training inputs")
    return X, y


def fit_tree(
    X: np.ndarray,
    y: np.ndarray,
    *,
    min_samples_split: int = 10,
    max_depth: int = 0,
    counts: np.ndarray | None = None,
    order: np.ndarray | None = None,
) -> DecisionTree:
    """Grow a CART regression tree (variance-reduction splits).

    Splits use midpoint thresholds between consecutive distinct sorted
    values, tie-broken toward the lowest column index then the lowest
    threshold; nodes stop below ``min_samples_split`` samples or at
    variance under ``MIN_VARIANCE``.  ``max_depth`` 0 means unlimited.
    ``counts``/``order`` let the forest pass bootstrap weights and the
    shared per-column pre-sort.
    """
    X, y = _check_training_inputs(X, y)
    if counts is None:
        counts = np.ones(X.shape[0], dtype=np.float64)
    else:
        counts = np.ascontiguousarray(np.asarray(counts, dtype=np.float64))
    if order is None:
        order = _kernels.sort_columns(X)
    kernel = _kernels.get_backend()
    nodes = kernel.grow_tree(X, y, counts, order,
                             float(min_samples_split), MIN_VARIANCE,
                             int(max_depth))
    return DecisionTree(*nodes, n_features=X.shape[1])
