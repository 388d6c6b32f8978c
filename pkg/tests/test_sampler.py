"""Constraint-aware rejection sampling of synthetic cases."""

from __future__ import annotations

import numpy as np
import pytest

from equarent.casegen import (
    SatisfiabilityError,
    load_schema,
    sample_cases,
    validate_case,
)
from equarent.casegen.sampler import percent_lattice


class TestSampleCases:
    def test_every_sampled_case_is_constraint_valid(self, schema, cases120):
        # [TRIVIAL by construction, asserted] the sampler's whole contract.
        for case in cases120:
            assert validate_case(schema, case) == []

    def test_deterministic_per_seed(self, schema):
        a = sample_cases(schema, 25, seed=11)
        b = sample_cases(schema, 25, seed=11)
        c = sample_cases(schema, 25, seed=12)
        assert [x.values for x in a] == [y.values for y in b]
        assert [x.values for x in a] != [z.values for z in c]

    def test_prefix_stability(self, schema):
        # Drawing more cases never changes the earlier ones.
        short = sample_cases(schema, 10, seed=5)
        long = sample_cases(schema, 40, seed=5)
        assert [x.values for x in short] == [y.values for y in long[:10]]

    def test_case_ids_unique_and_seed_tagged(self, cases120):
        ids = [c.case_id for c in cases120]
        assert len(set(ids)) == len(ids)
        assert ids[0] == "case-3-00000"
        assert all(i.startswith("case-3-") for i in ids)

    def test_count_and_value_types(self, schema, cases120):
        assert len(cases120) == 120
        case = cases120[0]
        for spec in schema.features:
            value = case.values[spec.id]
            if spec.kind == "boolean":
                assert isinstance(value, bool)
            elif spec.kind == "integer":
                assert isinstance(value, int) and not isinstance(value, bool)
            elif spec.kind == "categorical":
                assert value in spec.categories
            else:
                assert isinstance(value, float)

    def test_percent_values_live_on_their_lattice(self, schema, cases120):
        for spec in schema.features:
            if spec.kind != "percent" or spec.step is None:
                continue
            lattice = set(percent_lattice(spec).tolist())
            for case in cases120:
                assert case.values[spec.id] in lattice

    def test_declared_value_tables_are_respected(self, schema, cases120):
        for spec in schema.features:
            if spec.values is None or spec.kind == "categorical":
                continue
            allowed = set(float(v) for v in spec.values)
            for case in cases120:
                assert float(case.values[spec.id]) in allowed

    def test_categorical_frequencies_track_weights(self, schema):
        # Only meaningful for features no constraint touches: rejection
        # sampling deliberately reshapes the marginals of entangled ones.
        constrained = set()
        for c in schema.constraints:
            constrained |= c.referenced_features()
        cases = sample_cases(schema, 600, seed=2)
        checked = 0
        for spec in schema.features:
            if (spec.kind != "categorical" or len(spec.categories) < 2
                    or spec.id in constrained):
                continue
            checked += 1
            counts = {c: 0 for c in spec.categories}
            for case in cases:
                counts[case.values[spec.id]] += 1
            for cat, wgt in zip(spec.categories, spec.weights):
                assert counts[cat] / 600 == pytest.approx(wgt, abs=0.08)
        assert checked >= 2

    def test_n_must_be_positive(self, schema):
        with pytest.raises(ValueError):
            sample_cases(schema, 0, seed=1)

    def test_unsatisfiable_constraints_raise(self):
        doc = {
            "version": "t",
            "features": [{"id": "v", "kind": "integer", "range": [1, 10]}],
            "constraints": [
                {"id": "low", "kind": "range_bound", "feature": "v", "le": 3},
                {"id": "high", "kind": "range_bound", "feature": "v", "ge": 7},
            ],
            "document_template": "{v}",
        }
        tiny = load_schema(doc)
        with pytest.raises(SatisfiabilityError, match="rejected"):
            sample_cases(tiny, 5, seed=0, rejection_cap=2000)


class TestPercentLattice:
    def test_exact_grid_values(self, schema):
        spec = next(f for f in schema.features
                    if f.kind == "percent" and f.step is not None)
        grid = percent_lattice(spec)
        lo, hi = spec.range
        assert grid[0] == lo and grid[-1] <= hi
        # Each value is exactly k/10000 (correctly rounded once), i.e. the
        # number a user would type — not a sum of accumulated float steps.
        ints = np.round(grid * 10_000).astype(np.int64)
        assert np.all(grid == ints / 10_000)
        assert np.all(np.diff(ints) == round(spec.step * 10_000))
