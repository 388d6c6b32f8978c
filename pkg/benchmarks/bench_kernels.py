"""Benchmark the pure-numpy and compiled kernel backends against each other.

Runs the three hot kernels (CART growth, batch prediction, interventional
Shapley walk) on a synthetic workload shaped like the rent-reduction
datasets (lattice-valued columns with heavy ties), asserts that both
backends produce bit-identical results, and prints a timing table.

Usage::

    python benchmarks/bench_kernels.py [--rows 4000] [--cols 47]
        [--trees 20] [--background 64] [--explain 20] [--repeat 3]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from equarent import _kernels
from equarent._kernels import pure

try:
    from equarent._kernels import _ctree as compiled
except ImportError:  # pragma: no cover - benchmark still runs, pure only
    compiled = None


def make_workload(rows: int, cols: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Lattice-valued design matrix plus piecewise labels with ties."""
    rng = np.random.default_rng(seed)
    X = np.empty((rows, cols), dtype=np.float64)
    for j in range(cols):
        if j % 3 == 0:  # one-hot-like binary column
            X[:, j] = rng.integers(0, 2, size=rows).astype(np.float64)
        elif j % 3 == 1:  # coarse lattice (integer-valued)
            X[:, j] = rng.integers(0, 25, size=rows).astype(np.float64)
        else:  # percent lattice
            X[:, j] = rng.integers(0, 101, size=rows) / 100.0
    y = (
        0.4 * (X[:, 2] > 0.5)
        + 0.25 * (X[:, 4] > 12)
        + 0.1 * X[:, 0]
        + 0.05 * np.round(X[:, 5] * 4) / 4
    )
    return np.ascontiguousarray(X), np.ascontiguousarray(y)


def bench(fn, repeat: int):
    """Best-of-``repeat`` wall time and the last return value."""
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--rows", type=int, default=4000)
    parser.add_argument("--cols", type=int, default=47)
    parser.add_argument("--trees", type=int, default=20)
    parser.add_argument("--background", type=int, default=64)
    parser.add_argument("--explain", type=int, default=20,
                        help="instances to explain in the SHAP benchmark")
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    X, y = make_workload(args.rows, args.cols, args.seed)
    order = _kernels.sort_columns(X)
    rng = np.random.default_rng(args.seed)
    counts = [
        np.bincount(rng.integers(0, args.rows, size=args.rows),
                    minlength=args.rows).astype(np.float64)
        for _ in range(args.trees)
    ]
    background = np.ascontiguousarray(X[: args.background])
    instances = X[args.background : args.background + args.explain]
    wtable = _kernels.shapley_weight_table(args.cols)

    backends = [("pure", pure)]
    if compiled is not None:
        backends.append(("compiled", compiled))
    else:
        print("note: compiled extension not built; benchmarking pure only")

    results: dict[str, dict[str, float]] = {}
    artifacts: dict[str, tuple] = {}
    for name, mod in backends:
        t_grow, trees = bench(
            lambda mod=mod: [
                mod.grow_tree(X, y, c, order, 10.0, 1e-12, 0) for c in counts
            ],
            args.repeat,
        )
        t_pred, preds = bench(
            lambda mod=mod, trees=trees: np.stack(
                [mod.predict_tree(*t[:5], X) for t in trees]
            ),
            args.repeat,
        )
        t_shap, phis = bench(
            lambda mod=mod, trees=trees: np.stack(
                [
                    np.mean(mod.shap_tree(*t[:5], x, background, wtable), axis=0)
                    for t in trees
                    for x in instances
                ]
            ),
            args.repeat,
        )
        results[name] = {"grow": t_grow, "predict": t_pred, "shap": t_shap}
        artifacts[name] = (trees, preds, phis)

    if compiled is not None:
        p_trees, p_preds, p_phis = artifacts["pure"]
        c_trees, c_preds, c_phis = artifacts["compiled"]
        for tp, tc in zip(p_trees, c_trees):
            for ap, ac in zip(tp, tc):
                assert np.array_equal(np.asarray(ap), np.asarray(ac)), (
                    "backend trees differ"
                )
        assert np.array_equal(p_preds, c_preds), "backend predictions differ"
        assert np.array_equal(p_phis, c_phis), "backend attributions differ"
        print("parity: trees, predictions, and attributions are bit-identical")

    n_expl = args.trees * len(instances)
    print(
        f"\nworkload: {args.rows} rows x {args.cols} cols, {args.trees} trees, "
        f"background {args.background}, {len(instances)} instances "
        f"(best of {args.repeat})"
    )
    header = f"{'kernel':<10} " + "".join(f"{name:>14}" for name in results)
    if len(results) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for kernel, label in (("grow", "grow_tree"), ("predict", "predict_tree"),
                          ("shap", "shap_tree")):
        row = f"{label:<10} "
        for name in results:
            row += f"{results[name][kernel] * 1e3:>12.1f}ms"
        if len(results) == 2:
            row += f"{results['pure'][kernel] / results['compiled'][kernel]:>9.1f}x"
        print(row)
    per = results[list(results)[-1]]["shap"] / n_expl * 1e3
    print(f"\nshap walk: {per:.2f} ms per (tree, instance) on the fastest backend")


if __name__ == "__main__":
    main()
