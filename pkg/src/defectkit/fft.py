"""Fast-and-frugal tree ensembles built from median-split extreme ranges.

A depth-d tree is a chain of levels; each level tests one attribute against
its median and exits straight to a class when the test matches.  Choosing
the exit class at every level gives 2^d distinct tree shapes, so fitting
enumerates all of them, scores each on the training data with the goal
metric, and keeps the best.  Trees render to a human-readable rule list
(`if rfc > 32 then true`) and to a dict for machine use; both round-trip.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .dataset import CLEAN, DEFECTIVE, Dataset
from .errors import DegenerateDataError
from .metrics import GoalSpec, evaluate

LE = "<="
GT = ">"
_CLASS_NAMES = {CLEAN: "false", DEFECTIVE: "true"}
_CLASS_VALUES = {"false": CLEAN, "true": DEFECTIVE}


@dataclass(frozen=True)
class Range:
    """One attribute test: `attribute relation threshold` predicting a class."""

    attribute: int
    relation: str
    threshold: float
    predicted: int
    score: float

    def matches(self, features: np.ndarray) -> np.ndarray:
        column = features[:, self.attribute]
        return column <= self.threshold if self.relation == LE else column > self.threshold


@dataclass(frozen=True)
class FFTree:
    """Chain of (range, exit class) levels closed by a two-way final leaf.

    An instance takes the exit class of the first level it matches; if no
    level matches it gets the final leaf's false-branch class.
    """

    levels: tuple[tuple[Range, int], ...]
    final_leaf: tuple[int, int]
    structure_id: int
    feature_names: tuple[str, ...]

    @property
    def depth(self) -> int:
        return len(self.levels)

    def predict_one(self, features: np.ndarray) -> int:
        if len(features) != len(self.feature_names):
            raise ValueError(
                f"instance has {len(features)} features, tree expects {len(self.feature_names)}")
        row = np.asarray(features, dtype=float).reshape(1, -1)
        for rng, exit_class in self.levels:
            if rng.matches(row)[0]:
                return exit_class
        return self.final_leaf[1]

    def predict(self, features: np.ndarray) -> np.ndarray:
        features = np.asarray(features, dtype=float)
        if features.shape[1] != len(self.feature_names):
            raise ValueError(
                f"data has {features.shape[1]} features, tree expects {len(self.feature_names)}")
        out = np.full(len(features), self.final_leaf[1], dtype=int)
        undecided = np.ones(len(features), dtype=bool)
        for rng, exit_class in self.levels:
            hit = undecided & rng.matches(features)
            out[hit] = exit_class
            undecided &= ~hit
        return out

    def to_text(self) -> str:
        lines = []
        for i, (rng, exit_class) in enumerate(self.levels):
            prefix = "if" if i == 0 else "else if"
            lines.append(f"{prefix} {self.feature_names[rng.attribute]} {rng.relation} "
                         f"{rng.threshold:g} then {_CLASS_NAMES[exit_class]}")
        lines.append(f"else {_CLASS_NAMES[self.final_leaf[1]]}")
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {
            "structure_id": self.structure_id,
            "feature_names": list(self.feature_names),
            "levels": [{"attribute": r.attribute, "name": self.feature_names[r.attribute],
                        "relation": r.relation, "threshold": r.threshold,
                        "predicted": r.predicted, "score": r.score, "exit_class": e}
                       for r, e in self.levels],
            "final_leaf": list(self.final_leaf),
        }


def tree_from_dict(payload: dict) -> FFTree:
    levels = tuple(
        (Range(lv["attribute"], lv["relation"], lv["threshold"], lv["predicted"], lv["score"]),
         lv["exit_class"])
        for lv in payload["levels"])
    return FFTree(levels, tuple(payload["final_leaf"]), payload["structure_id"],
                  tuple(payload["feature_names"]))


def tree_from_text(text: str, feature_names) -> FFTree:
    """Parse the rule-list format back into a tree (scores are not recoverable)."""
    feature_names = tuple(feature_names)
    index = {name: i for i, name in enumerate(feature_names)}
    levels = []
    final_class = None
    for line in (ln.strip() for ln in text.strip().splitlines()):
        body = line
        for prefix in ("else if ", "if "):
            if body.startswith(prefix):
                body = body[len(prefix):]
                break
        else:
            final_class = _CLASS_VALUES[body.removeprefix("else ").strip()]
            break
        name, relation, threshold, kw, klass = body.split()
        if kw != "then" or relation not in (LE, GT):
            raise ValueError(f"cannot parse rule line: {line!r}")
        exit_class = _CLASS_VALUES[klass]
        levels.append((Range(index[name], relation, float(threshold), exit_class, 0.0),
                       exit_class))
    if final_class is None:
        raise ValueError("rule list has no final else line")
    structure_id = sum((exit_class << i) for i, (_, exit_class) in enumerate(levels))
    if levels:
        final_leaf = (levels[-1][1], final_class)
    else:
        final_leaf = (final_class, final_class)
    return FFTree(tuple(levels), final_leaf, structure_id, feature_names)


@dataclass(frozen=True)
class FFTEnsemble:
    """All 2^d trees plus each one's training goal score and the chosen best."""

    trees: tuple[FFTree, ...]
    scores: tuple[float, ...]
    best: int
    goal: GoalSpec

    @property
    def best_tree(self) -> FFTree:
        return self.trees[self.best]


def median_split(data: Dataset, attribute: int) -> float:
    """Attribute threshold: the lower median (value at index (n-1)//2 after sort)."""
    if not len(data):
        raise ValueError("cannot take a median of no data")
    values = np.sort(data.features[:, attribute])
    return float(values[(len(values) - 1) // 2])


def _majority(labels: np.ndarray, fallback: int = CLEAN) -> int:
    if not len(labels):
        return fallback
    return int(np.bincount(labels, minlength=2).argmax())


def _score_range(rng: Range, features, labels, locs, goal: GoalSpec) -> float:
    # A range alone is a one-rule model: matches get its class, the rest the
    # opposite class, which yields a complete confusion matrix to score.
    predicted = np.where(rng.matches(features), rng.predicted, 1 - rng.predicted)
    return evaluate(goal, labels, predicted, locs)


def _candidate_ranges(features, labels, locs, goal: GoalSpec) -> list[Range]:
    candidates = []
    for attribute in range(features.shape[1]):
        values = np.sort(features[:, attribute])
        threshold = float(values[(len(values) - 1) // 2])
        for relation in (LE, GT):
            for predicted in (CLEAN, DEFECTIVE):
                rng = Range(attribute, relation, threshold, predicted, 0.0)
                score = _score_range(rng, features, labels, locs, goal)
                candidates.append(replace(rng, score=score))
    return candidates


def _rank(candidates: list[Range], goal: GoalSpec) -> list[Range]:
    sign = 1.0 if goal.direction == "minimize" else -1.0
    return sorted(candidates,
                  key=lambda r: (sign * r.score, r.attribute, 0 if r.relation == LE else 1))


def score_ranges(data: Dataset, goal: GoalSpec) -> list[Range]:
    """All median-split ranges over all attributes, best-scoring first."""
    if len(np.unique(data.labels)) < 2:
        raise DegenerateDataError("range scoring needs both classes present")
    candidates = _candidate_ranges(data.features, data.labels, data.locs, goal)
    return _rank(candidates, goal)


def build_tree(data: Dataset, goal: GoalSpec, structure_id: int, depth: int) -> FFTree:
    """Build the tree whose per-level exit classes follow the bits of structure_id.

    Level i exits to bit i of structure_id; its range is the best-scoring
    range predicting that class on the data left over from earlier levels.
    If the leftovers run out (empty or single-class) the tree closes early
    with a majority leaf, keeping its structure_id for bookkeeping.
    """
    if depth < 0 or not 0 <= structure_id < 2 ** depth:
        raise ValueError(f"structure_id {structure_id} out of range for depth {depth}")
    names = data.schema.feature_names
    features, labels, locs = data.features, data.labels, data.locs
    overall_majority = _majority(labels)
    levels = []
    for level in range(depth):
        if not len(labels) or len(np.unique(labels)) < 2:
            leaf = _majority(labels, overall_majority)
            return FFTree(tuple(levels), (leaf, leaf), structure_id, names)
        exit_class = (structure_id >> level) & 1
        candidates = [r for r in _candidate_ranges(features, labels, locs, goal)
                      if r.predicted == exit_class]
        best = _rank(candidates, goal)[0]
        levels.append((best, exit_class))
        if level == depth - 1:
            return FFTree(tuple(levels), (exit_class, 1 - exit_class), structure_id, names)
        keep = ~best.matches(features)
        features, labels, locs = features[keep], labels[keep], locs[keep]
    leaf = _majority(labels, overall_majority)
    return FFTree((), (leaf, leaf), structure_id, names)


def fit(data: Dataset, goal: GoalSpec, depth: int = 4) -> FFTEnsemble:
    """Enumerate all 2^depth trees, score each on the training data, keep the best."""
    if depth < 1:
        raise ValueError(f"depth must be at least 1, got {depth}")
    if len(np.unique(data.labels)) < 2:
        raise DegenerateDataError("fitting needs both classes present")
    trees = []
    scores = []
    for structure_id in range(2 ** depth):
        tree = build_tree(data, goal, structure_id, depth)
        predicted = tree.predict(data.features)
        trees.append(tree)
        scores.append(evaluate(goal, data.labels, predicted, data.locs))
    best = 0
    for i, score in enumerate(scores):
        if goal.better(score, scores[best]):
            best = i
    return FFTEnsemble(tuple(trees), tuple(scores), best, goal)


def predict(tree: FFTree, instance) -> int:
    """Class label for one instance (an Instance or a bare feature vector)."""
    features = getattr(instance, "features", instance)
    return tree.predict_one(np.asarray(features, dtype=float))
