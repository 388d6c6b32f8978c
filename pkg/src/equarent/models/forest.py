"""Random forest: bagged CART trees with per-tree derived seeds."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from equarent import _kernels
from equarent.models.tree import DecisionTree, _check_training_inputs, MIN_VARIANCE


@dataclass(frozen=True)
class RandomForest:
    """Mean of ``n_trees`` CART trees grown on bootstrap resamples."""

    trees: tuple[DecisionTree, ...]
    seed: int
    min_samples_split: int
    bootstrap: bool

    @property
    def n_trees(self) -> int:
        return len(self.trees)

    @property
    def n_features(self) -> int:
        return self.trees[0].n_features

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.ascontiguousarray(np.atleast_2d(np.asarray(X, dtype=np.float64)))
        stacked = np.stack([t.predict(X) for t in self.trees])
        return np.mean(stacked, axis=0)

    def features_used(self) -> set[int]:
        used: set[int] = set()
        for t in self.trees:
            used |= t.features_used()
        return used

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "min_samples_split": self.min_samples_split,
            "bootstrap": self.bootstrap,
            "trees": [t.to_dict() for t in self.trees],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RandomForest":
        return cls(
            trees=tuple(DecisionTree.from_dict(t) for t in d["trees"]),
            seed=int(d["seed"]),
            min_samples_split=int(d["min_samples_split"]),
            bootstrap=bool(d["bootstrap"]),
        )


def bootstrap_counts(n: int, rng: np.random.Generator) -> np.ndarray:
    """Multiplicity weights of a size-n resample drawn with replacement."""
    picks = rng.integers(0, n, size=n)
    return np.bincount(picks, minlength=n).astype(np.float64)


def fit_forest(
    X: np.ndarray,
    y: np.ndarray,
    *,
    n_trees: int = 100,
    min_samples_split: int = 10,
    bootstrap: bool = True,
    max_depth: int = 0,
    seed: int = 0,
) -> RandomForest:
    """Train the forest; tree t's randomness derives only from (seed, t).

    All trees consider every column at every split and share one stable
    pre-sort of ``X``, so results are identical regardless of training
    order or parallelism.
    """
    X, y = _check_training_inputs(X, y)
    n = X.shape[0]
    order = _kernels.sort_columns(X)
    kernel = _kernels.get_backend()
    trees = []
    for t in range(n_trees):
        if bootstrap:
            counts = bootstrap_counts(n, np.random.default_rng([seed, t]))
        else:
            counts = np.ones(n, dtype=np.float64)
        nodes = kernel.grow_tree(X, y, counts, order,
                                 float(min_samples_split), MIN_VARIANCE,
                                 int(max_depth))
        trees.append(DecisionTree(*nodes, n_features=X.shape[1]))
    return RandomForest(
        trees=tuple(trees),
        seed=seed,
        min_samples_split=min_samples_split,
        bootstrap=bootstrap,
    )
