"""Shared fixtures: the shipped schema, a small labeled corpus, and a
trained forest reused by the explanation / bundle / service tests."""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))  # tests.oracles helpers

from equarent.bundle import ModelBundle
from equarent.casegen import (
    build_encoding,
    ingest_labels,
    label_cases,
    load_oracle,
    load_schema,
    sample_cases,
)
from equarent.explain import BackgroundSet
from equarent.models import fit_forest


@pytest.fixture(scope="session")
def schema():
    return load_schema()


@pytest.fixture(scope="session")
def encoding(schema):
    return build_encoding(schema)


@pytest.fixture(scope="session")
def cases120(schema):
    return sample_cases(schema, 120, seed=3)


@pytest.fixture(scope="session")
def dataset120(schema, cases120):
    oracle = load_oracle("oracle_default")
    return ingest_labels(schema, cases120, label_cases(cases120, oracle))


@pytest.fixture(scope="session")
def matrix120(schema, dataset120):
    X, y = dataset120.matrix(schema)
    return X, y


@pytest.fixture(scope="session")
def forest30(matrix120):
    X, y = matrix120
    return fit_forest(X, y, n_trees=30, min_samples_split=10, seed=0)


@pytest.fixture(scope="session")
def background16(matrix120):
    X, _ = matrix120
    return BackgroundSet.sample(X, size=16, seed=0)


@pytest.fixture(scope="session")
def bundle120(schema, dataset120, forest30, background16):
    return ModelBundle(
        schema=schema,
        encoding=dataset120.encoding,
        model=forest30,
        background=background16,
        metadata={"model": "forest", "origin": "test fixture"},
    )


@pytest.fixture()
def rng():
    return np.random.default_rng(20260823)
