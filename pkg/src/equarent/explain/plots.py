"""JSON payloads for attribution plots.

Each builder returns a plain dict a client can render directly; no
drawing happens here.  Supported kinds: waterfall, force, beeswarm,
dependence, decision.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence

import numpy as np

from equarent.explain.shap_values import Explanation

PLOT_KINDS = ("waterfall", "force", "beeswarm", "dependence", "decision")


def _ranked(contributions) -> list[tuple[str, float]]:
    """Contributions by descending |phi|, ties broken by feature id."""
    return sorted(contributions, key=lambda e: (-abs(e[1]), e[0]))


def _numeric_or_none(value) -> float | None:
    if isinstance(value, bool):
        return 1.0 if value else 0.0
    if isinstance(value, (int, float)):
        return float(value)
    return None


def waterfall_payload(explanation: Explanation) -> dict:
    """Cumulative walk from the base value to the prediction."""
    entries = []
    cumulative = explanation.base_value
    for fid, phi in _ranked(explanation.contributions):
        start = cumulative
        cumulative += phi
        entries.append({"feature": fid, "phi": phi, "start": start, "end": cumulative})
    return {
        "kind": "waterfall",
        "base_value": explanation.base_value,
        "prediction": explanation.prediction,
        "entries": entries,
    }


def force_payload(explanation: Explanation) -> dict:
    """Signed contribution segments pushing the base toward the prediction."""
    ranked = _ranked(explanation.contributions)
    return {
        "kind": "force",
        "base_value": explanation.base_value,
        "prediction": explanation.prediction,
        "positive": [{"feature": f, "phi": p} for f, p in ranked if p > 0],
        "negative": [{"feature": f, "phi": p} for f, p in ranked if p < 0],
    }


def _mean_abs_order(explanations: Sequence[Explanation]) -> list[str]:
    totals: dict[str, float] = {}
    for ex in explanations:
        for fid, phi in ex.contributions:
            totals[fid] = totals.get(fid, 0.0) + abs(phi)
    return sorted(totals, key=lambda fid: (-totals[fid] / len(explanations), fid))


def beeswarm_payload(explanations: Sequence[Explanation],
                     feature_values: Sequence[Mapping[str, object]]) -> dict:
    """Per-feature (phi, value) point clouds, ordered by mean |phi|.

    Values of non-numeric features are null; the client colors those
    points neutrally.
    """
    if len(explanations) != len(feature_values):
        raise ValueError("one value mapping per explanation required")
    if not explanations:
        raise ValueError("need at least one explanation")
    features = []
    for fid in _mean_abs_order(explanations):
        points = [
            {"phi": ex.contribution(fid), "value": _numeric_or_none(vals.get(fid))}
            for ex, vals in zip(explanations, feature_values)
        ]
        features.append({"feature": fid, "points": points})
    return {"kind": "beeswarm", "features": features}


def dependence_payload(explanations: Sequence[Explanation],
                       feature_values: Sequence[Mapping[str, object]],
                       feature: str) -> dict:
    """(feature value, phi) pairs for one feature across instances."""
    if len(explanations) != len(feature_values):
        raise ValueError("one value mapping per explanation required")
    try:
        points = [
            {"value": _numeric_or_none(vals.get(feature)), "phi": ex.contribution(feature)}
            for ex, vals in zip(explanations, feature_values)
        ]
    except KeyError:
        raise ValueError(f"unknown feature: {feature}") from None
    return {"kind": "dependence", "feature": feature, "points": points}


def decision_payload(explanations: Sequence[Explanation]) -> dict:
    """Cumulative attribution paths, one per instance.

    Features are listed from least to most important; each path starts
    at that instance's base value and ends at its prediction.
    """
    if not explanations:
        raise ValueError("need at least one explanation")
    order = list(reversed(_mean_abs_order(explanations)))
    paths = []
    for ex in explanations:
        cumulative = [ex.base_value]
        for fid in order:
            cumulative.append(cumulative[-1] + ex.contribution(fid))
        paths.append({
            "base_value": ex.base_value,
            "prediction": ex.prediction,
            "cumulative": cumulative,
        })
    return {"kind": "decision", "features": order, "paths": paths}


def plot_payload(kind: str, *, explanation: Explanation | None = None,
                 explanations: Sequence[Explanation] | None = None,
                 feature_values: Sequence[Mapping[str, object]] | None = None,
                 feature: str | None = None) -> dict:
    """Dispatch to the builder for ``kind``; unknown kinds are errors."""
    if kind == "waterfall" or kind == "force":
        if explanation is None:
            raise ValueError(f"{kind} plot needs a single explanation")
        return waterfall_payload(explanation) if kind == "waterfall" \
            else force_payload(explanation)
    if kind == "beeswarm":
        if explanations is None or feature_values is None:
            raise ValueError("beeswarm plot needs explanations and feature values")
        return beeswarm_payload(explanations, feature_values)
    if kind == "dependence":
        if explanations is None or feature_values is None or feature is None:
            raise ValueError("dependence plot needs explanations, values and a feature")
        return dependence_payload(explanations, feature_values, feature)
    if kind == "decision":
        if explanations is None:
            raise ValueError("decision plot needs explanations")
        return decision_payload(explanations)
    raise ValueError(f"unknown plot kind: {kind!r} (expected one of {PLOT_KINDS})")
