"""The model family: constant, median, linear, tree, forest, MLP."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from equarent.models.baselines import (
    ConstantModel,
    LinearModel,
    fit_constant,
    fit_linear,
    fit_median,
)
from equarent.models.evaluation import (
    CvReport,
    TrainerError,
    cross_validate,
    kfold_split,
    mae,
)
from equarent.models.forest import RandomForest, bootstrap_counts, fit_forest
from equarent.models.mlp import MLP, TrainingError, fit_mlp, gradient, init_mlp, loss_mae
from equarent.models.serialize import model_digest, model_from_dict, model_to_dict
from equarent.models.tree import MIN_VARIANCE, DecisionTree, fit_tree

MODEL_KINDS = ("constant", "median", "linear", "tree", "forest", "mlp")


@dataclass(frozen=True)
class FeatureMatrix:
    """Encoded cases with labels and column names."""

    X: np.ndarray
    y: np.ndarray
    columns: tuple[str, ...]

    def __post_init__(self):
        X = np.ascontiguousarray(np.atleast_2d(np.asarray(self.X, dtype=np.float64)))
        y = np.asarray(self.y, dtype=np.float64)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        if X.shape[0] != y.shape[0]:
            raise ValueError("row/label count mismatch")
        if X.shape[1] != len(self.columns):
            raise ValueError("column-name count mismatch")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
            raise ValueError("non-finite entries")
        if y.size and (y.min() < 0 or y.max() > 1):
            raise ValueError("labels must lie in [0, 1]")


__all__ = [
    "MODEL_KINDS", "MIN_VARIANCE", "ConstantModel", "CvReport", "DecisionTree",
    "FeatureMatrix", "LinearModel", "MLP", "RandomForest", "TrainerError",
    "TrainingError", "bootstrap_counts", "cross_validate", "fit_constant",
    "fit_forest", "fit_linear", "fit_median", "fit_mlp", "fit_tree",
    "gradient", "init_mlp", "kfold_split", "loss_mae", "mae", "model_digest",
    "model_from_dict", "model_to_dict",
]
