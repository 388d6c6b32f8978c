"""MAE scoring and deterministic k-fold cross-validation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class TrainerError(RuntimeError):
    """A trainer failed inside cross-validation; message names the fold."""


def mae(predictions: np.ndarray, labels: np.ndarray) -> float:
    p = np.asarray(predictions, dtype=np.float64)
    y = np.asarray(labels, dtype=np.float64)
    if p.shape != y.shape or p.size == 0:
        raise ValueError("predictions and labels must have equal nonzero length")
    return float(np.mean(np.abs(p - y)))


def kfold_split(n: int, k: int, seed: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Shuffled partition into k folds with sizes differing by at most 1."""
    if not 2 <= k <= n:
        raise ValueError(f"need 2 <= k <= n, got k={k}, n={n}")
    perm = np.random.default_rng(seed).permutation(n)
    base, extra = divmod(n, k)
    folds = []
    start = 0
    for i in range(k):
        size = base + (1 if i < extra else 0)
        test = np.sort(perm[start:start + size])
        train = np.sort(np.concatenate([perm[:start], perm[start + size:]]))
        folds.append((train, test))
        start += size
    return folds


@dataclass(frozen=True)
class CvReport:
    """Per-fold and mean MAE for one model under k-fold CV."""

    model_id: str
    k: int
    seed: int
    fold_maes: tuple[float, ...]

    @property
    def mean_mae(self) -> float:
        return float(np.mean(self.fold_maes))

    def to_dict(self) -> dict:
        return {
            "model_id": self.model_id,
            "k": self.k,
            "seed": self.seed,
            "fold_maes": list(self.fold_maes),
            "mean_mae": self.mean_mae,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CvReport":
        return cls(model_id=d["model_id"], k=int(d["k"]), seed=int(d["seed"]),
                   fold_maes=tuple(d["fold_maes"]))


def cross_validate(trainer, X: np.ndarray, y: np.ndarray,
                   k: int = 10, seed: int = 0, model_id: str = "model") -> CvReport:
    """Train on each train fold, score MAE on its test fold."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    y = np.asarray(y, dtype=np.float64)
    if y.size < k:
        raise ValueError(f"dataset of {y.size} rows cannot be split into {k} folds")
    fold_maes = []
    for fold, (train, test) in enumerate(kfold_split(y.size, k, seed)):
        try:
            model = trainer(X[train], y[train])
        except Exception as exc:
            raise TrainerError(f"trainer {model_id!r} failed on fold {fold}: {exc}") from exc
        fold_maes.append(mae(model.predict(X[test]), y[test]))
    return CvReport(model_id=model_id, k=k, seed=seed, fold_maes=tuple(fold_maes))
