"""Baseline classifiers behind one train/predict interface.

Every learner turns into a Model whose score is a defect probability (or a
margin mapped into [0, 1]); the label is score >= threshold.  Parameter
names, defaults and tuning ranges are exposed as ParamSpaces that plug
straight into the differential-evolution tuner.

The SVM here is linear only: a hinge-loss classifier trained by
deterministic subgradient descent with regularisation 1/C.  The kernelised
parameter table is still constructible (svm_kernel_space) so tuners can
represent it, but no kernel solver is provided.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .dataset import Dataset
from .errors import DegenerateDataError
from .metrics import GoalSpec, goal as make_goal
from . import fft as fft_mod
from .tuner import CATEGORICAL, CONTINUOUS, INTEGER, ParamSpace, ParamSpec

KINDS = ("cart", "random_forest", "naive_bayes", "logistic", "knn", "linear_svm", "fft")

_RF_DIMS = (
    ParamSpec("threshold", CONTINUOUS, 0.01, 1.0, default=0.5),
    ParamSpec("max_feature", CONTINUOUS, 0.01, 1.0, default=1.0),
    ParamSpec("max_leaf_nodes", INTEGER, 1, 50, default=50),
    ParamSpec("min_sample_split", INTEGER, 2, 20, default=2),
    ParamSpec("min_samples_leaf", INTEGER, 1, 20, default=1),
)

_SPACES = {
    "random_forest": ParamSpace(_RF_DIMS + (
        ParamSpec("n_estimators", INTEGER, 50, 150, default=100),)),
    "cart": ParamSpace(_RF_DIMS),
    "naive_bayes": ParamSpace((ParamSpec("threshold", CONTINUOUS, 0.01, 1.0, default=0.5),)),
    "logistic": ParamSpace((ParamSpec("threshold", CONTINUOUS, 0.01, 1.0, default=0.5),)),
    "knn": ParamSpace((ParamSpec("k", INTEGER, 1, 20, default=8),
                       ParamSpec("threshold", CONTINUOUS, 0.01, 1.0, default=0.5))),
    "linear_svm": ParamSpace((ParamSpec("C", CONTINUOUS, 1.0, 50.0, default=1.0),)),
    "fft": ParamSpace((ParamSpec("d", INTEGER, 1, 5, default=4),)),
}

GD_EPOCHS = 500
GD_LEARNING_RATE = 0.1


def param_space(kind: str) -> ParamSpace:
    """The tunable dimensions of a learner, with table defaults and ranges."""
    if kind not in _SPACES:
        raise ValueError(f"unknown learner kind {kind!r}; choose from {KINDS}")
    return _SPACES[kind]


def svm_kernel_space() -> ParamSpace:
    """The four-dimensional SVM tuning space, kernel choice included.

    Representable for tuning experiments even though only the linear kernel
    has a solver here; gamma defaults to 1/n_features for 200-dimensional
    inputs.
    """
    return ParamSpace((
        ParamSpec("C", CONTINUOUS, 1.0, 50.0, default=1.0),
        ParamSpec("kernel", CATEGORICAL, values=("linear", "poly", "rbf", "sigmoid"),
                  default="rbf"),
        ParamSpec("gamma", CONTINUOUS, 0.0, 1.0, default=1 / 200),
        ParamSpec("coef0", CONTINUOUS, 0.0, 1.0, default=0.0),
    ))


@dataclass(frozen=True)
class LearnerSpec:
    """A learner kind plus parameter overrides (validated against its space)."""

    kind: str
    params: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        space = param_space(self.kind)
        for name in self.params:
            space[name]  # raises KeyError for unknown names
        space.validate(self.params)

    def resolved(self) -> dict[str, Any]:
        merged = param_space(self.kind).defaults()
        merged.update(self.params)
        return merged


@dataclass
class Model:
    """Fitted state plus the training schema fingerprint predictions must match."""

    kind: str
    feature_names: tuple[str, ...]
    threshold: float
    state: Any


def _z_stats(features: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    mean = features.mean(axis=0)
    std = features.std(axis=0)
    std[std == 0] = 1.0
    return mean, std


def _entropy(n_pos: np.ndarray, n: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        p = np.where(n > 0, n_pos / np.maximum(n, 1), 0.0)
        h = -(np.where(p > 0, p * np.log2(p), 0.0)
              + np.where(p < 1, (1 - p) * np.log2(1 - p), 0.0))
    return np.where(n > 0, h, 0.0)


class _TreeNode:
    __slots__ = ("prob", "feature", "threshold", "left", "right")

    def __init__(self, prob: float):
        self.prob = prob
        self.feature = None
        self.threshold = None
        self.left = None
        self.right = None


def _best_split(features, labels, candidates, min_samples_leaf):
    """(gain, feature, threshold) of the best entropy split, or None.

    All candidate features are scanned in one vectorised pass; ties break
    toward the lowest feature index, then the lowest boundary.
    """
    n = len(labels)
    if n < 2:
        return None
    parent = _entropy(np.array([labels.sum()]), np.array([n]))[0]
    sub = features[:, candidates]
    order = np.argsort(sub, axis=0, kind="stable")
    v = np.take_along_axis(sub, order, axis=0)
    cum_pos = np.cumsum(labels[order], axis=0)

    left_n = np.arange(1, n, dtype=float)[:, None]
    right_n = n - left_n
    left_pos = cum_pos[:-1]
    right_pos = cum_pos[-1] - left_pos
    gain = parent - (left_n * _entropy(left_pos, left_n)
                     + right_n * _entropy(right_pos, right_n)) / n
    valid = ((v[1:] > v[:-1])  # boundary between distinct values
             & (left_n >= min_samples_leaf) & (right_n >= min_samples_leaf))
    gain = np.where(valid, gain, -np.inf)

    flat = int(np.argmax(gain.T))  # feature-major: lowest feature index wins ties
    col, boundary = divmod(flat, n - 1)
    best_gain = gain[boundary, col]
    if best_gain <= 1e-12:
        return None
    threshold = float((v[boundary, col] + v[boundary + 1, col]) / 2.0)
    return (float(best_gain), int(candidates[col]), threshold)


class _Cart:
    """Entropy CART grown best-first up to max_leaf_nodes leaves."""

    def __init__(self, params: dict, seed: int):
        self.params = params
        self.seed = seed
        self.root = None

    def _feature_sample(self, n_features: int, rng: np.random.Generator) -> np.ndarray:
        size = max(1, int(round(self.params["max_feature"] * n_features)))
        if size >= n_features:
            return np.arange(n_features)
        return np.sort(rng.choice(n_features, size=size, replace=False))

    def fit(self, features: np.ndarray, labels: np.ndarray) -> "_Cart":
        rng = np.random.default_rng(self.seed)
        min_split = self.params["min_sample_split"]
        min_leaf = self.params["min_samples_leaf"]
        max_leaves = self.params["max_leaf_nodes"]
        self.root = _TreeNode(float(labels.mean()))
        heap = []
        counter = 0

        def consider(node, feats, labs):
            nonlocal counter
            if len(labs) < min_split or len(np.unique(labs)) < 2:
                return
            split = _best_split(feats, labs, self._feature_sample(feats.shape[1], rng), min_leaf)
            if split is not None:
                heapq.heappush(heap, (-split[0], counter, node, split, feats, labs))
                counter += 1

        consider(self.root, features, labels)
        leaves = 1
        while heap and leaves < max_leaves:
            _, _, node, (gain, f, threshold), feats, labs = heapq.heappop(heap)
            mask = feats[:, f] <= threshold
            node.feature, node.threshold = f, threshold
            node.left = _TreeNode(float(labs[mask].mean()))
            node.right = _TreeNode(float(labs[~mask].mean()))
            leaves += 1
            consider(node.left, feats[mask], labs[mask])
            consider(node.right, feats[~mask], labs[~mask])
        return self

    def prob_one(self, x: np.ndarray) -> float:
        node = self.root
        while node.feature is not None:
            node = node.left if x[node.feature] <= node.threshold else node.right
        return node.prob

    def prob(self, features: np.ndarray) -> np.ndarray:
        """Leaf probabilities for a whole matrix, routed with index masks."""
        out = np.empty(len(features))
        stack = [(self.root, np.arange(len(features)))]
        while stack:
            node, idx = stack.pop()
            if node.feature is None:
                out[idx] = node.prob
            elif len(idx):
                mask = features[idx, node.feature] <= node.threshold
                stack.append((node.left, idx[mask]))
                stack.append((node.right, idx[~mask]))
        return out

    def structure(self):
        """Nested tuples describing the tree shape (tests compare these)."""
        def walk(node):
            if node.feature is None:
                return ("leaf", round(node.prob, 12))
            return (node.feature, node.threshold, walk(node.left), walk(node.right))
        return walk(self.root)


def _require_both_classes(data: Dataset, kind: str) -> None:
    if len(np.unique(data.labels)) < 2:
        raise DegenerateDataError(f"{kind} needs both classes in the training data")


def fit(spec: LearnerSpec, data: Dataset, seed: int, goal: GoalSpec | None = None) -> Model:
    """Train spec.kind on the data; deterministic given (spec, data, seed)."""
    if not len(data):
        raise ValueError("cannot fit on an empty dataset")
    params = spec.resolved()
    threshold = params.get("threshold", 0.5)
    kind = spec.kind
    features, labels = data.features, data.labels

    if kind == "cart":
        _require_both_classes(data, kind)
        state = _Cart(params, seed).fit(features, labels)
    elif kind == "random_forest":
        _require_both_classes(data, kind)
        # Trees differ through per-split feature sampling with per-tree seeds
        # (seed + index), not bootstrapping, so a one-tree forest at
        # max_feature=1.0 is exactly the CART build.  With every feature
        # sampled the builds are identical, so one tree serves all slots.
        if params["max_feature"] >= 1.0:
            tree = _Cart(params, seed).fit(features, labels)
            state = [tree] * params["n_estimators"]
        else:
            state = [_Cart(params, seed + i).fit(features, labels)
                     for i in range(params["n_estimators"])]
    elif kind == "naive_bayes":
        state = _fit_naive_bayes(features, labels)
    elif kind == "logistic":
        _require_both_classes(data, kind)
        state = _fit_logistic(features, labels)
    elif kind == "knn":
        _require_both_classes(data, kind)
        mean, std = _z_stats(features)
        state = {"mean": mean, "std": std, "points": (features - mean) / std,
                 "labels": labels, "k": min(params["k"], len(labels))}
    elif kind == "linear_svm":
        _require_both_classes(data, kind)
        state = _fit_linear_svm(features, labels, params["C"])
    elif kind == "fft":
        _require_both_classes(data, kind)
        state = fft_mod.fit(data, goal or make_goal("dist2heaven"), params["d"])
    else:
        raise ValueError(f"unknown learner kind {kind!r}")
    return Model(kind, data.schema.feature_names, threshold, state)


def _fit_naive_bayes(features, labels):
    classes = np.unique(labels)
    priors, means, variances = {}, {}, {}
    overall_var = features.var(axis=0).max() if features.size else 1.0
    smoothing = 1e-9 * max(overall_var, 1.0)
    for c in classes:
        rows = features[labels == c]
        priors[int(c)] = len(rows) / len(labels)
        means[int(c)] = rows.mean(axis=0)
        variances[int(c)] = rows.var(axis=0) + smoothing
    return {"classes": [int(c) for c in classes], "priors": priors,
            "means": means, "vars": variances}


def _fit_logistic(features, labels):
    mean, std = _z_stats(features)
    x = (features - mean) / std
    y = labels.astype(float)
    w = np.zeros(x.shape[1])
    b = 0.0
    for _ in range(GD_EPOCHS):
        p = 1.0 / (1.0 + np.exp(-(x @ w + b)))
        err = p - y
        w -= GD_LEARNING_RATE * (x.T @ err) / len(y)
        b -= GD_LEARNING_RATE * err.mean()
    return {"mean": mean, "std": std, "w": w, "b": b}


def _fit_linear_svm(features, labels, c_penalty):
    mean, std = _z_stats(features)
    x = (features - mean) / std
    y = np.where(labels == 1, 1.0, -1.0)
    lam = 1.0 / c_penalty
    w = np.zeros(x.shape[1])
    b = 0.0
    for _ in range(GD_EPOCHS):
        margins = y * (x @ w + b)
        violators = margins < 1
        w -= GD_LEARNING_RATE * (lam * w - (y[violators, None] * x[violators]).sum(0) / len(y))
        b += GD_LEARNING_RATE * y[violators].sum() / len(y)
    return {"mean": mean, "std": std, "w": w, "b": b}


def _score_features(model: Model, x: np.ndarray) -> float:
    state = model.state
    if model.kind == "cart":
        return state.prob_one(x)
    if model.kind == "random_forest":
        return float(np.mean([tree.prob_one(x) >= 0.5 for tree in state]))
    if model.kind == "naive_bayes":
        log_post = {}
        for c in state["classes"]:
            var = state["vars"][c]
            log_like = -0.5 * (np.log(2 * math.pi * var)
                               + (x - state["means"][c]) ** 2 / var).sum()
            log_post[c] = math.log(state["priors"][c]) + log_like
        if 1 not in log_post:
            return 0.0
        if 0 not in log_post:
            return 1.0
        shift = max(log_post.values())
        p1 = math.exp(log_post[1] - shift)
        return p1 / (p1 + math.exp(log_post[0] - shift))
    if model.kind in ("logistic", "linear_svm"):
        z = (x - state["mean"]) / state["std"]
        return float(1.0 / (1.0 + np.exp(-(z @ state["w"] + state["b"]))))
    if model.kind == "knn":
        z = (x - state["mean"]) / state["std"]
        distances = np.sqrt(((state["points"] - z) ** 2).sum(axis=1))
        nearest = np.argsort(distances, kind="stable")[:state["k"]]
        return float(state["labels"][nearest].mean())
    if model.kind == "fft":
        return float(state.best_tree.predict_one(x))
    raise ValueError(f"unknown learner kind {model.kind!r}")


def predict(model: Model, instance) -> tuple[int, float]:
    """(label, score) for one instance; label is score >= model.threshold."""
    x = np.asarray(getattr(instance, "features", instance), dtype=float)
    if x.shape != (len(model.feature_names),):
        raise ValueError(f"instance has {x.shape} features, "
                         f"model expects {len(model.feature_names)}")
    score = _score_features(model, x)
    return int(score >= model.threshold), score


def _score_matrix(model: Model, x: np.ndarray) -> np.ndarray:
    state = model.state
    if model.kind == "cart":
        return state.prob(x)
    if model.kind == "random_forest":
        vote_cache = {}  # shared trees (max_feature=1.0) vote once
        votes = np.zeros(len(x))
        for tree in state:
            if id(tree) not in vote_cache:
                vote_cache[id(tree)] = tree.prob(x) >= 0.5
            votes += vote_cache[id(tree)]
        return votes / len(state)
    if model.kind == "naive_bayes":
        log_post = {}
        for c in state["classes"]:
            var = state["vars"][c]
            log_like = -0.5 * (np.log(2 * math.pi * var)
                               + (x - state["means"][c]) ** 2 / var).sum(axis=1)
            log_post[c] = math.log(state["priors"][c]) + log_like
        if 1 not in log_post:
            return np.zeros(len(x))
        if 0 not in log_post:
            return np.ones(len(x))
        shift = np.maximum(log_post[0], log_post[1])
        p1 = np.exp(log_post[1] - shift)
        return p1 / (p1 + np.exp(log_post[0] - shift))
    if model.kind in ("logistic", "linear_svm"):
        z = (x - state["mean"]) / state["std"]
        return 1.0 / (1.0 + np.exp(-(z @ state["w"] + state["b"])))
    if model.kind == "knn":
        z = (x - state["mean"]) / state["std"]
        distances = np.sqrt(((z[:, None, :] - state["points"][None, :, :]) ** 2).sum(axis=2))
        nearest = np.argsort(distances, axis=1, kind="stable")[:, :state["k"]]
        return state["labels"][nearest].mean(axis=1)
    if model.kind == "fft":
        return state.best_tree.predict(x).astype(float)
    raise ValueError(f"unknown learner kind {model.kind!r}")


def predict_dataset(model: Model, data: Dataset) -> tuple[np.ndarray, np.ndarray]:
    """(labels, scores) for a whole dataset, after a schema fingerprint check."""
    if data.schema.feature_names != model.feature_names:
        raise ValueError("dataset schema does not match the model's training schema")
    scores = _score_matrix(model, data.features)
    return (scores >= model.threshold).astype(int), scores
