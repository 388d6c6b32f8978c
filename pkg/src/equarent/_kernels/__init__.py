"""Numerical kernels for tree growing, prediction, and Shapley walks.

Two interchangeable backends implement the same contract:

* ``pure`` -- numpy reference implementation, always available.
* ``compiled`` -- Cython extension, used automatically when the build
  produced it.

Both produce bit-identical trees and attributions; ``EQUARENT_BACKEND``
(``pure`` or ``compiled``) forces a choice, which the parity tests and
the benchmark rely on.
"""

from __future__ import annotations

import math
import os

import numpy as np

from equarent._kernels import pure

try:  # pragma: no cover - exercised only when the extension is built
    from equarent._kernels import _ctree as compiled
except ImportError:  # pragma: no cover
    compiled = None

LEAF = pure.LEAF

_FORCED = os.environ.get("EQUARENT_BACKEND", "").strip().lower()


def available_backends() -> tuple[str, ...]:
    """Names of the backends importable in this installation."""
    if compiled is not None:
        return ("compiled", "pure")
    return ("pure",)


def get_backend(name: str | None = None):
    """Return the kernel module for *name* (default: best available)."""
    if name in (None, ""):
        name = _FORCED or ("compiled" if compiled is not None else "pure")
    if name == "pure":
        return pure
    if name == "compiled":
        if compiled is None:
            raise RuntimeError(
                "compiled kernel backend requested but the extension is not "
                "built; reinstall without EQUARENT_NO_EXT or use the pure "
                "backend"
            )
        return compiled
    raise ValueError(f"unknown kernel backend {name!r}")


_DEFAULT = get_backend()
BACKEND = "pure" if _DEFAULT is pure else "compiled"

grow_tree = _DEFAULT.grow_tree
predict_tree = _DEFAULT.predict_tree
shap_tree = _DEFAULT.shap_tree


def sort_columns(X: np.ndarray) -> np.ndarray:
    """Stable per-column argsort shared by every tree grown on ``X``.

    Growing all trees from one precomputed sort keeps the row order seen
    by the split scan identical across backends and avoids re-sorting
    inside every node.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    return np.ascontiguousarray(np.argsort(X, axis=0, kind="stable").astype(np.int32))


def shapley_weight_table(max_entries: int) -> np.ndarray:
    """Table ``w[a, b] = a! b! / (a + b + 1)!`` for path weights.

    ``a`` counts features fixed to the explained instance on the path,
    ``b`` those fixed to the background row; the table must cover the
    longest possible path, i.e. ``max_entries`` distinct features.
    """
    size = max_entries + 1
    table = np.empty((size, size), dtype=np.float64)
    for a in range(size):
        for b in range(size):
            table[a, b] = 1.0 / ((a + b + 1) * math.comb(a + b, a))
    return np.ascontiguousarray(table)
