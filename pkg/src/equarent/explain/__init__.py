"""Exact Shapley attributions, global importance, and plot payloads."""

from equarent.explain.importance import (
    DEFAULT_PRUNE_THRESHOLD,
    ImportanceEntry,
    ImportanceReport,
    PruneResult,
    global_importance,
    project_encoding,
    project_matrix,
    prune_features,
)
from equarent.explain.plots import (
    PLOT_KINDS,
    beeswarm_payload,
    decision_payload,
    dependence_payload,
    force_payload,
    plot_payload,
    waterfall_payload,
)
from equarent.explain.shap_values import (
    BRUTE_FORCE_MAX_DIM,
    DEFAULT_BACKGROUND_SIZE,
    BackgroundSet,
    Explanation,
    aggregate_contributions,
    brute_force_shap,
    forest_column_phi,
    shap_tree_rows,
    tree_shap,
)

__all__ = [
    "BRUTE_FORCE_MAX_DIM",
    "DEFAULT_BACKGROUND_SIZE",
    "DEFAULT_PRUNE_THRESHOLD",
    "PLOT_KINDS",
    "BackgroundSet",
    "Explanation",
    "ImportanceEntry",
    "ImportanceReport",
    "PruneResult",
    "aggregate_contributions",
    "beeswarm_payload",
    "brute_force_shap",
    "decision_payload",
    "dependence_payload",
    "force_payload",
    "forest_column_phi",
    "global_importance",
    "plot_payload",
    "project_encoding",
    "project_matrix",
    "prune_features",
    "shap_tree_rows",
    "tree_shap",
    "waterfall_payload",
]
