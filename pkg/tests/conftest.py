"""Shared builders for synthetic defect datasets."""

import numpy as np
import pytest

from defectkit.dataset import AttributeSchema, Dataset


def make_dataset(features, labels, loc=None, names=None, provenance=()):
    """Dataset from raw arrays; a loc column is appended unless one is passed."""
    features = np.asarray(features, dtype=float)
    if features.ndim == 1:
        features = features.reshape(-1, 1)
    labels = np.asarray(labels, dtype=int)
    if loc is None:
        loc = np.full(len(labels), 10.0)
    full = np.column_stack([features, np.asarray(loc, dtype=float)])
    if names is None:
        names = [f"a{i}" for i in range(features.shape[1])]
    all_names = tuple(names) + ("loc", "bug")
    schema = AttributeSchema(all_names, loc_index=len(all_names) - 2,
                             label_index=len(all_names) - 1)
    return Dataset(schema, full, labels, provenance)


def planted_dataset(n=300, n_noise=9, defect_ratio=0.45, seed=7, gap=10.0):
    """One perfectly separating attribute (column 0) plus noise columns.

    Defective rows get attribute 0 pushed up by `gap`, so the threshold
    test a0 > anything in (max clean, min defective) separates exactly.
    """
    rng = np.random.default_rng(seed)
    labels = (rng.random(n) < defect_ratio).astype(int)
    signal = labels * gap + rng.random(n)
    noise = rng.normal(size=(n, n_noise))
    loc = rng.integers(5, 500, size=n).astype(float)
    return make_dataset(np.column_stack([signal, noise]), labels, loc=loc)


@pytest.fixture
def separator6():
    """Six instances split 3/3 where attribute 0 over its median separates."""
    return make_dataset([[1.0, 5.0], [2.0, 5.0], [3.0, 5.0],
                         [10.0, 5.0], [11.0, 5.0], [12.0, 5.0]],
                        [0, 0, 0, 1, 1, 1])


@pytest.fixture
def separated8():
    """Eight instances, two attributes, linearly (axis-)separable."""
    rng = np.random.default_rng(3)
    clean = np.column_stack([rng.uniform(0, 1, 4), rng.uniform(0, 1, 4)])
    defective = np.column_stack([rng.uniform(9, 10, 4), rng.uniform(9, 10, 4)])
    return make_dataset(np.vstack([clean, defective]), [0, 0, 0, 0, 1, 1, 1, 1])
