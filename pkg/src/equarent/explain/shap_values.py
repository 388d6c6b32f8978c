"""Exact interventional Shapley attributions for forest predictions.

``tree_shap`` walks each tree once per background row in polynomial
time; ``brute_force_shap`` enumerates all feature subsets and exists to
verify it.  Both attribute against the same interventional value
function: v(S) is the expected prediction with features in S fixed to
the explained instance and the rest drawn from the background set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from equarent import _kernels
from equarent.casegen.dataset import EncodingMap
from equarent.models.forest import RandomForest
from equarent.models.tree import DecisionTree

BRUTE_FORCE_MAX_DIM = 20
DEFAULT_BACKGROUND_SIZE = 64


@dataclass(frozen=True)
class BackgroundSet:
    """Reference rows defining the interventional baseline distribution."""

    X: np.ndarray
    seed: int | None = None

    def __post_init__(self):
        X = np.ascontiguousarray(np.atleast_2d(np.asarray(self.X, dtype=np.float64)))
        if X.shape[0] == 0:
            raise ValueError("background set must be nonempty")
        object.__setattr__(self, "X", X)

    @property
    def size(self) -> int:
        return int(self.X.shape[0])

    @classmethod
    def sample(cls, X: np.ndarray, size: int = DEFAULT_BACKGROUND_SIZE,
               seed: int = 0) -> "BackgroundSet":
        """Up to ``size`` rows drawn without replacement with a fixed seed."""
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        n = X.shape[0]
        if n <= size:
            return cls(X=X.copy(), seed=seed)
        rows = np.sort(np.random.default_rng(seed).choice(n, size=size, replace=False))
        return cls(X=X[rows], seed=seed)

    def to_dict(self) -> dict:
        return {"X": self.X.tolist(), "seed": self.seed}

    @classmethod
    def from_dict(cls, d: dict) -> "BackgroundSet":
        return cls(X=np.asarray(d["X"], dtype=np.float64), seed=d.get("seed"))


@dataclass(frozen=True)
class Explanation:
    """Base value + per-feature contributions summing to the prediction."""

    base_value: float
    prediction: float
    column_phi: np.ndarray
    contributions: tuple[tuple[str, float], ...]

    @property
    def phi_sum(self) -> float:
        return float(np.sum(self.column_phi))

    @property
    def additivity_gap(self) -> float:
        return abs(self.base_value + self.phi_sum - self.prediction)

    def contribution(self, feature_id: str) -> float:
        for fid, phi in self.contributions:
            if fid == feature_id:
                return phi
        raise KeyError(feature_id)

    def top_features(self, k: int) -> tuple[str, ...]:
        """The k raw features with the largest |phi|, importance order.

        Ties break by feature id so the selection is deterministic.
        """
        ranked = sorted(self.contributions, key=lambda e: (-abs(e[1]), e[0]))
        return tuple(fid for fid, _ in ranked[:max(0, k)])

    def to_dict(self) -> dict:
        return {
            "base_value": self.base_value,
            "prediction": self.prediction,
            "contributions": [{"feature": f, "phi": p} for f, p in self.contributions],
        }


def aggregate_contributions(column_phi: np.ndarray, encoding: EncodingMap | None,
                            columns: tuple[str, ...] | None = None,
                            ) -> tuple[tuple[str, float], ...]:
    """Sum one-hot column contributions into raw-feature contributions."""
    if encoding is None:
        names = columns or tuple(f"x{i}" for i in range(column_phi.shape[0]))
        return tuple((name, float(v)) for name, v in zip(names, column_phi))
    out: list[tuple[str, float]] = []
    for fid in encoding.feature_ids():
        idx = encoding.column_indices(fid)
        out.append((fid, float(np.sum(column_phi[idx]))))
    return tuple(out)


def shap_tree_rows(tree: DecisionTree, x: np.ndarray, background: np.ndarray,
                   wtable: np.ndarray) -> np.ndarray:
    """Per-background-row contribution matrix (m, d) for one tree."""
    kernel = _kernels.get_backend()
    return kernel.shap_tree(tree.feature, tree.threshold, tree.left, tree.right,
                            tree.value, np.ascontiguousarray(x, dtype=np.float64),
                            np.ascontiguousarray(background, dtype=np.float64),
                            wtable)


def forest_column_phi(forest: RandomForest, x: np.ndarray,
                      background: BackgroundSet,
                      wtable: np.ndarray | None = None) -> np.ndarray:
    """Column-level Shapley values: mean over trees and background rows.

    The averaging mirrors ``RandomForest.predict`` (mean of per-tree
    results), so additivity against the forest output holds to float
    accuracy.
    """
    if wtable is None:
        wtable = _kernels.shapley_weight_table(forest.n_features)
    per_tree = np.stack([
        np.mean(shap_tree_rows(t, x, background.X, wtable), axis=0)
        for t in forest.trees
    ])
    return np.mean(per_tree, axis=0)


def tree_shap(forest: RandomForest, x: np.ndarray, background: BackgroundSet,
              encoding: EncodingMap | None = None) -> Explanation:
    """Exact interventional Shapley explanation of one forest prediction."""
    x = np.asarray(x, dtype=np.float64).ravel()
    if x.shape[0] != forest.n_features:
        raise ValueError(
            f"instance has {x.shape[0]} columns, model expects {forest.n_features}")
    if background.X.shape[1] != forest.n_features:
        raise ValueError(
            f"background has {background.X.shape[1]} columns, "
            f"model expects {forest.n_features}")
    column_phi = forest_column_phi(forest, x, background)
    base = float(np.mean(forest.predict(background.X)))
    prediction = float(forest.predict(x[None, :])[0])
    return Explanation(
        base_value=base,
        prediction=prediction,
        column_phi=column_phi,
        contributions=aggregate_contributions(column_phi, encoding),
    )


def brute_force_shap(predict, x: np.ndarray, background: BackgroundSet,
                     encoding: EncodingMap | None = None) -> Explanation:
    """Shapley values by full subset enumeration (dimension <= 20).

    phi_i = sum over S not containing i of
    |S|! (d - |S| - 1)! / d! * (v(S + i) - v(S)).
    """
    x = np.asarray(x, dtype=np.float64).ravel()
    d = x.shape[0]
    if d > BRUTE_FORCE_MAX_DIM:
        raise ValueError(f"brute force limited to {BRUTE_FORCE_MAX_DIM} columns, got {d}")
    bg = background.X
    if bg.shape[1] != d:
        raise ValueError("background dimension mismatch")
    m = bg.shape[0]
    n_masks = 1 << d
    values = np.empty(n_masks, dtype=np.float64)
    chunk = max(1, (1 << 22) // max(1, m * d))  # cap hybrid batch memory
    for start in range(0, n_masks, chunk):
        masks = np.arange(start, min(start + chunk, n_masks))
        fixed = (masks[:, None] >> np.arange(d)[None, :]) & 1  # (masks, d)
        hybrids = np.where(fixed[:, None, :].astype(bool), x[None, None, :],
                           bg[None, :, :])
        preds = np.asarray(predict(hybrids.reshape(-1, d)), dtype=np.float64)
        values[masks] = preds.reshape(len(masks), m).mean(axis=1)

    popcount = np.zeros(n_masks, dtype=np.int64)
    all_masks = np.arange(n_masks)
    for i in range(d):
        popcount += (all_masks >> i) & 1
    weight = np.asarray([
        math.factorial(s) * math.factorial(d - s - 1) / math.factorial(d)
        for s in range(d)
    ])
    column_phi = np.empty(d, dtype=np.float64)
    for i in range(d):
        without = all_masks[((all_masks >> i) & 1) == 0]
        gains = values[without | (1 << i)] - values[without]
        column_phi[i] = float(np.sum(weight[popcount[without]] * gains))

    prediction = float(np.asarray(predict(x[None, :]))[0])
    return Explanation(
        base_value=float(values[0]),
        prediction=prediction,
        column_phi=column_phi,
        contributions=aggregate_contributions(column_phi, encoding),
    )
