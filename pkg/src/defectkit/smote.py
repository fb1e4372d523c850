"""Minority-class synthesis along nearest-neighbour segments, plus undersampling.

Synthetic instances sit at x + u*(nn - x) for a random minority seed x, one
of its k nearest minority neighbours nn (Minkowski distance with power r),
and u uniform in [0, 1].  The m parameter sets the target minority count as
a percent of the original training size: m=50 balances the classes exactly
(the majority is undersampled to make room), m >= 100 only synthesises.
Tuning k, m, r with differential evolution is what the harness calls a
"smotuned" run.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .errors import DegenerateDataError

M_CHOICES = (50, 100, 200, 400)


@dataclass(frozen=True)
class SmoteConfig:
    k: int = 5
    m: int = 50
    r: float = 2.0
    seed: int = 0

    def __post_init__(self):
        if not 1 <= self.k <= 20:
            raise ValueError(f"k must be in [1, 20], got {self.k}")
        if self.m not in M_CHOICES:
            raise ValueError(f"m must be one of {M_CHOICES}, got {self.m}")
        if not 0.1 <= self.r <= 5:
            raise ValueError(f"r must be in [0.1, 5], got {self.r}")


def minkowski(a, b, r: float) -> float:
    """(sum |a_i - b_i|^r)^(1/r); r=2 is Euclidean, r=1 Manhattan."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"vector length mismatch: {a.shape} vs {b.shape}")
    if r <= 0:
        raise ValueError(f"Minkowski power must be positive, got {r}")
    return float((np.abs(a - b) ** r).sum() ** (1.0 / r))


def _neighbour_table(points: np.ndarray, k: int, r: float) -> np.ndarray:
    """Indices of each point's k nearest minority neighbours (self excluded)."""
    n = len(points)
    diffs = np.abs(points[:, None, :] - points[None, :, :]) ** r
    distances = diffs.sum(axis=2) ** (1.0 / r)
    np.fill_diagonal(distances, np.inf)
    # argsort is stable, so equal distances break by dataset index.
    return np.argsort(distances, axis=1, kind="stable")[:, :k]


def apply(data: Dataset, cfg: SmoteConfig) -> Dataset:
    """Rebalanced copy of the data; the input dataset is never touched.

    Output keeps the surviving original instances in their original order
    and appends the synthetic minority instances after them.
    """
    labels = data.labels
    counts = np.bincount(labels, minlength=2)
    if counts.min() == 0:
        raise DegenerateDataError("both classes must be present to rebalance")
    minority = 1 if counts[1] <= counts[0] else 0  # ties treat defective as minority
    minority_idx = np.nonzero(labels == minority)[0]
    majority_idx = np.nonzero(labels != minority)[0]
    if len(minority_idx) < 2:
        raise DegenerateDataError("need at least 2 minority instances to interpolate")

    k = cfg.k
    if k >= len(minority_idx):
        k = len(minority_idx) - 1
        warnings.warn(f"k={cfg.k} clamped to {k}: only {len(minority_idx)} minority instances")

    n = len(data)
    target_minority = int(np.floor(cfg.m / 100 * n + 0.5))
    n_synthetic = max(0, target_minority - len(minority_idx))
    if target_minority < n:
        keep_majority = min(len(majority_idx), n - target_minority)
    else:
        # No amount of undersampling keeps the total at n once the minority
        # target alone reaches it; keep the majority rather than erase it.
        keep_majority = len(majority_idx)

    rng = np.random.default_rng(cfg.seed)
    minority_points = data.features[minority_idx]
    neighbours = _neighbour_table(minority_points, k, cfg.r)

    synthetic = np.empty((n_synthetic, data.features.shape[1]))
    for i in range(n_synthetic):
        seed_pos = int(rng.integers(0, len(minority_idx)))
        nn_pos = int(neighbours[seed_pos][int(rng.integers(0, k))])
        u = rng.uniform()
        synthetic[i] = minority_points[seed_pos] + u * (minority_points[nn_pos]
                                                        - minority_points[seed_pos])

    if keep_majority < len(majority_idx):
        kept = np.sort(rng.choice(majority_idx, size=keep_majority, replace=False))
    else:
        kept = majority_idx
    originals = np.sort(np.concatenate([minority_idx, kept]))

    features = np.concatenate([data.features[originals], synthetic])
    new_labels = np.concatenate([labels[originals],
                                 np.full(n_synthetic, minority, dtype=int)])
    return Dataset(data.schema, features, new_labels, data.provenance)
