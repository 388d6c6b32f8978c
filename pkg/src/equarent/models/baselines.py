"""Constant, median, and linear baselines."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ConstantModel:
    """Predicts one value everywhere; optionally carries its sweep curve."""

    value: float
    sweep_grid: tuple[float, ...] | None = None
    sweep_mae: tuple[float, ...] | None = None

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X))
        return np.full(X.shape[0], self.value, dtype=np.float64)


@dataclass(frozen=True)
class LinearModel:
    """Ordinary least squares with intercept."""

    weights: np.ndarray
    intercept: float

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        return X @ self.weights + self.intercept


def fit_constant(labels: np.ndarray, step: float = 0.01) -> ConstantModel:
    """Sweep constants 0, step, ..., 1 and keep the training-MAE argmin.

    Ties break toward the smaller constant; the full sweep curve is kept
    on the model for reporting.
    """
    y = np.asarray(labels, dtype=np.float64)
    if y.size == 0:
        raise ValueError("labels must be nonempty")
    if not 0 < step <= 0.5:
        raise ValueError("step must lie in (0, 0.5]")
    n_steps = int(np.floor(1.0 / step + 1e-9))
    grid = np.round(np.arange(n_steps + 1) * step, 10)
    maes = np.mean(np.abs(y[None, :] - grid[:, None]), axis=1)
    best = int(np.argmin(maes))  # first minimum = smallest constant
    return ConstantModel(
        value=float(grid[best]),
        sweep_grid=tuple(float(g) for g in grid),
        sweep_mae=tuple(float(m) for m in maes),
    )


def fit_median(labels: np.ndarray) -> ConstantModel:
    """Predict the sample median (mean of the middle two for even n)."""
    y = np.asarray(labels, dtype=np.float64)
    if y.size == 0:
        raise ValueError("labels must be nonempty")
    return ConstantModel(value=float(np.median(y)))


def fit_linear(X: np.ndarray, y: np.ndarray) -> LinearModel:
    """Least squares through an orthogonal decomposition.

    Rank-deficient systems get the minimum-norm solution, so duplicated
    or constant columns stay finite.
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    y = np.asarray(y, dtype=np.float64)
    if X.shape[0] != y.shape[0] or y.size == 0:
        raise ValueError("X and y must have matching nonzero length")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise ValueError("non-finite training inputs")
    A = np.hstack([X, np.ones((X.shape[0], 1))])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    return LinearModel(weights=coef[:-1], intercept=float(coef[-1]))
