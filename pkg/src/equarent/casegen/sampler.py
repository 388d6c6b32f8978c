"""Constraint-respecting synthetic case sampling.

Draws whole batches per feature from the declared distributions, keeps
the rows on which every constraint holds (rejection sampling), and stops
once ``n`` cases are collected.  A cap on consecutive rejections turns
jointly unsatisfiable constraint systems into a clear error instead of
an endless loop.
"""

from __future__ import annotations

import numpy as np

from equarent.casegen.schema import CaseRecord, Constraint, FeatureSchema, FeatureSpec

DEFAULT_REJECTION_CAP = 10_000
_BATCH = 2048


class SatisfiabilityError(RuntimeError):
    """Rejection sampling exceeded the consecutive-rejection cap."""


def percent_lattice(spec: FeatureSpec) -> np.ndarray:
    """Evenly stepped percent values, built on an integer grid.

    Working in whole percent points and dividing once avoids the float
    drift of repeated ``k * step`` sums, so 0.85 is exactly the value a
    user would type.
    """
    lo, hi = spec.range
    step = spec.step or 0.01
    scale = 10_000  # step resolution: 0.01 percentage points
    start, stop, inc = (round(lo * scale), round(hi * scale), round(step * scale))
    return np.arange(start, stop + 1, inc, dtype=np.int64) / scale


def _draw_column(spec: FeatureSpec, m: int, rng: np.random.Generator) -> np.ndarray:
    if spec.kind == "categorical":
        return rng.choice(len(spec.categories), size=m, p=np.asarray(spec.weights))
    if spec.kind == "boolean":
        return rng.random(m) < spec.p_true
    if spec.values is not None:
        return rng.choice(np.asarray(spec.values, dtype=np.float64), size=m,
                          p=np.asarray(spec.weights))
    lo, hi = spec.range
    if spec.kind == "integer":
        return rng.integers(int(lo), int(hi) + 1, size=m)
    if spec.kind == "percent" and spec.step is not None:
        return rng.choice(percent_lattice(spec), size=m)
    return rng.uniform(lo, hi, size=m)


def _condition_mask(cond, cols: dict[str, np.ndarray], schema: FeatureSchema) -> np.ndarray:
    spec = schema.feature(cond["feature"])
    col = cols[cond["feature"]]
    if "equals" in cond:
        target = cond["equals"]
        if spec.kind == "categorical":
            return col == spec.categories.index(target)
        return col == target
    if "gt" in cond:
        return col > cond["gt"]
    if "ge" in cond:
        return col >= cond["ge"]
    if "in" in cond:
        if spec.kind == "categorical":
            codes = [spec.categories.index(t) for t in cond["in"]]
            return np.isin(col, codes)
        return np.isin(col, list(cond["in"]))
    raise ValueError(f"condition needs one of equals/gt/ge/in: {cond!r}")


def constraint_mask(c: Constraint, cols: dict[str, np.ndarray], schema: FeatureSchema) -> np.ndarray:
    """Vectorized form of ``Constraint.holds`` over column arrays."""
    p = c.params
    if c.kind == "range_bound":
        col = cols[p["feature"]]
        mask = np.ones(col.shape, dtype=bool)
        if "gt" in p:
            mask &= col > p["gt"]
        if "ge" in p:
            mask &= col >= p["ge"]
        if "lt" in p:
            mask &= col < p["lt"]
        if "le" in p:
            mask &= col <= p["le"]
        return mask
    if c.kind == "implication":
        when = _condition_mask(p["when"], cols, schema)
        then = _condition_mask(p["then"], cols, schema)
        return ~when | then
    if c.kind == "arithmetic":
        left = cols[p["left"]]
        right = cols[p["right"]] * p.get("scale", 1)
        op = p.get("op", "eq")
        ops = {"eq": np.equal, "le": np.less_equal, "ge": np.greater_equal,
               "lt": np.less, "gt": np.greater}
        mask = ops[op](left, right)
        if "when" in p:
            mask = ~_condition_mask(p["when"], cols, schema) | mask
        return mask
    raise ValueError(f"unknown constraint kind {c.kind!r}")


def _to_python(spec: FeatureSpec, raw) -> object:
    if spec.kind == "categorical":
        return spec.categories[int(raw)]
    if spec.kind == "boolean":
        return bool(raw)
    if spec.kind == "integer":
        return int(raw)
    return float(raw)


def sample_cases(
    schema: FeatureSchema,
    n: int,
    seed: int,
    *,
    rejection_cap: int = DEFAULT_REJECTION_CAP,
) -> list[CaseRecord]:
    """Sample ``n`` constraint-valid cases, deterministically per seed."""
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = np.random.default_rng(seed)
    cases: list[CaseRecord] = []
    tail_rejections = 0
    while len(cases) < n:
        m = _BATCH
        cols = {spec.id: _draw_column(spec, m, rng) for spec in schema.features}
        mask = np.ones(m, dtype=bool)
        for c in schema.constraints:
            mask &= constraint_mask(c, cols, schema)
        idx = np.flatnonzero(mask)
        if idx.size == 0:
            tail_rejections += m
            if tail_rejections >= rejection_cap:
                raise SatisfiabilityError(
                    f"{tail_rejections} consecutive draws rejected; "
                    "constraints appear jointly unsatisfiable"
                )
            continue
        longest_run = max(int(idx[0]) + tail_rejections,
                          int(np.max(np.diff(idx), initial=0)) - 1)
        if longest_run >= rejection_cap:
            raise SatisfiabilityError(
                f"{longest_run} consecutive draws rejected; "
                "constraints appear jointly unsatisfiable"
            )
        tail_rejections = m - 1 - int(idx[-1])
        for row in idx:
            if len(cases) >= n:
                break
            values = {spec.id: _to_python(spec, cols[spec.id][row])
                      for spec in schema.features}
            cases.append(CaseRecord(
                case_id=f"case-{seed}-{len(cases):05d}", values=values))
    return cases
