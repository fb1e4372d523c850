"""Classification and effort-aware evaluation metrics.

Threshold metrics (precision, recall, F1, accuracy) come out of an n-class
confusion matrix.  dist2heaven is the normalised distance of a (recall,
false alarm) pair from the ideal corner (1, 0) -- smaller is better.  P_opt
compares the code-inspection lift curve of a model against the best and
worst possible inspection orderings -- larger is better.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDataError

MINIMIZE = "minimize"
MAXIMIZE = "maximize"

GOAL_DIRECTIONS = {
    "dist2heaven": MINIMIZE,
    "p_opt": MAXIMIZE,
    "f1": MAXIMIZE,
    "accuracy": MAXIMIZE,
    "precision": MAXIMIZE,
    "recall": MAXIMIZE,
}


@dataclass(frozen=True)
class GoalSpec:
    """A named optimisation target plus the direction that makes it better."""

    kind: str
    direction: str = ""

    def __post_init__(self):
        if self.kind not in GOAL_DIRECTIONS:
            raise ValueError(f"unknown goal {self.kind!r}; choose from {sorted(GOAL_DIRECTIONS)}")
        required = GOAL_DIRECTIONS[self.kind]
        if self.direction == "":
            object.__setattr__(self, "direction", required)
        elif self.direction != required:
            raise ValueError(f"goal {self.kind} must be {required}d, not {self.direction}d")

    def better(self, a: float, b: float) -> bool:
        """True when score `a` beats score `b` under this goal."""
        return a < b if self.direction == MINIMIZE else a > b

    def worst_value(self) -> float:
        return math.inf if self.direction == MINIMIZE else -math.inf


def goal(kind: str) -> GoalSpec:
    return GoalSpec(kind)


@dataclass(frozen=True)
class ConfusionMatrix:
    """counts[i][j] = number of instances of actual class i classified as j."""

    counts: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        n = len(self.counts)
        if any(len(row) != n for row in self.counts):
            raise ValueError("confusion matrix must be square")
        if any(c < 0 for row in self.counts for c in row):
            raise ValueError("confusion matrix entries must be non-negative")

    @property
    def n_classes(self) -> int:
        return len(self.counts)

    @property
    def total(self) -> int:
        return sum(sum(row) for row in self.counts)


def confusion(actual, predicted, n_classes: int) -> ConfusionMatrix:
    """Tally (actual, predicted) label pairs into an n_classes x n_classes grid."""
    actual = np.asarray(actual, dtype=int)
    predicted = np.asarray(predicted, dtype=int)
    if actual.shape != predicted.shape:
        raise ValueError(f"length mismatch: {len(actual)} actual vs {len(predicted)} predicted")
    if actual.size and not ((0 <= actual).all() and (actual < n_classes).all()
                            and (0 <= predicted).all() and (predicted < n_classes).all()):
        raise ValueError(f"labels must lie in [0, {n_classes})")
    flat = np.bincount(actual * n_classes + predicted, minlength=n_classes * n_classes)
    grid = flat.reshape(n_classes, n_classes)
    return ConfusionMatrix(tuple(tuple(int(c) for c in row) for row in grid))


def class_metrics(m: ConfusionMatrix, j: int) -> tuple[float, float, float]:
    """(precision, recall, f1) for class j; any 0/0 ratio is defined as 0."""
    if m.total == 0:
        raise ValueError("cannot compute ratios on an empty confusion matrix")
    tp = m.counts[j][j]
    predicted_j = sum(m.counts[i][j] for i in range(m.n_classes))
    actual_j = sum(m.counts[j][i] for i in range(m.n_classes))
    precision = tp / predicted_j if predicted_j else 0.0
    recall = tp / actual_j if actual_j else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1


def accuracy(m: ConfusionMatrix) -> float:
    if m.total == 0:
        raise ValueError("cannot compute accuracy on an empty confusion matrix")
    return sum(m.counts[i][i] for i in range(m.n_classes)) / m.total


def false_alarm(m: ConfusionMatrix) -> float:
    """Binary false-positive rate fp / (fp + tn); 0/0 is 0."""
    fp = m.counts[0][1]
    tn = m.counts[0][0]
    return fp / (fp + tn) if fp + tn else 0.0


def dist2heaven(recall: float, fa: float) -> float:
    """Normalised distance from (recall, false alarm) to the ideal point (1, 0)."""
    if not (0 <= recall <= 1 and 0 <= fa <= 1):
        raise ValueError(f"recall and false alarm must be in [0, 1], got ({recall}, {fa})")
    return math.sqrt((1 - recall) ** 2 + fa ** 2) / math.sqrt(2)


@dataclass(frozen=True)
class LiftCurve:
    """Cumulative (effort fraction, recall fraction) polyline from (0,0) to (1,1)."""

    points: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if self.points[0] != (0.0, 0.0) or self.points[-1] != (1.0, 1.0):
            raise ValueError("lift curve must run from (0,0) to (1,1)")
        xs = [p[0] for p in self.points]
        ys = [p[1] for p in self.points]
        if any(b < a - 1e-12 for a, b in zip(xs, xs[1:])) \
                or any(b < a - 1e-12 for a, b in zip(ys, ys[1:])):
            raise ValueError("lift curve coordinates must be non-decreasing")

    def area(self) -> float:
        """Area under the polyline by the trapezoid rule."""
        total = 0.0
        for (x0, y0), (x1, y1) in zip(self.points, self.points[1:]):
            total += (x1 - x0) * (y0 + y1) / 2.0
        return total


def lift_curve(instances, order) -> LiftCurve:
    """Accumulate effort (loc) against defects found while visiting `order`.

    `instances` is a sequence of (loc, label) pairs; `order` must be a
    permutation of their indices.
    """
    locs = np.asarray([loc for loc, _ in instances], dtype=float)
    labels = np.asarray([lab for _, lab in instances], dtype=int)
    order = np.asarray(order, dtype=int)
    if sorted(order.tolist()) != list(range(len(instances))):
        raise ValueError("order must be a permutation of the instance indices")
    total_loc = locs.sum()
    total_defects = labels.sum()
    if total_loc <= 0:
        raise DegenerateDataError("total loc is zero; effort axis undefined")
    if total_defects == 0:
        raise DegenerateDataError("no defective instances; recall axis undefined")
    points = [(0.0, 0.0)]
    cum_loc = 0.0
    cum_defects = 0
    for idx in order:
        cum_loc += locs[idx]
        cum_defects += labels[idx]
        points.append((cum_loc / total_loc, cum_defects / total_defects))
    points[-1] = (1.0, 1.0)
    return LiftCurve(tuple(points))


def _defect_density(locs, labels) -> np.ndarray:
    # loc=0 rows would divide by zero; clamp the denominator.
    return np.asarray(labels, dtype=float) / np.maximum(np.asarray(locs, dtype=float), 1.0)


def _model_order(locs, predicted) -> list[int]:
    # Predicted-defective modules first, each group in ascending loc, stable.
    return sorted(range(len(locs)), key=lambda i: (0 if predicted[i] else 1, locs[i]))


def inspection_areas(instances, predicted) -> tuple[float, float, float]:
    """(S(model), S(optimal), S(worst)) lift-curve areas for a prediction vector."""
    locs = [loc for loc, _ in instances]
    labels = [lab for _, lab in instances]
    density = _defect_density(locs, labels)
    model = _model_order(locs, predicted)
    optimal = sorted(range(len(locs)), key=lambda i: -density[i])
    worst = sorted(range(len(locs)), key=lambda i: density[i])
    return (lift_curve(instances, model).area(),
            lift_curve(instances, optimal).area(),
            lift_curve(instances, worst).area())


def p_opt(instances, predicted) -> float:
    """Effort-aware score: 1 - (S(optimal) - S(model)) / (S(optimal) - S(worst)).

    `predicted` holds hard labels or scores; scores are thresholded at 0.5
    before the predicted-defective-first, ascending-loc layout is built.
    """
    predicted = [int(float(p) >= 0.5) for p in predicted]
    s_model, s_optimal, s_worst = inspection_areas(instances, predicted)
    if s_optimal == s_worst:
        raise DegenerateDataError("optimal and worst orderings coincide; P_opt undefined")
    return 1.0 - (s_optimal - s_model) / (s_optimal - s_worst)


def evaluate(g: GoalSpec, actual, predicted, locs=None) -> float:
    """Score a prediction vector under the named goal (binary defect labels)."""
    if g.kind == "p_opt":
        if locs is None:
            raise ValueError("p_opt needs loc values")
        return p_opt(list(zip(locs, actual)), predicted)
    hard = (np.asarray(predicted, dtype=float) >= 0.5).astype(int)
    m = confusion(actual, hard, 2)
    if g.kind == "accuracy":
        return accuracy(m)
    precision, recall, f1 = class_metrics(m, 1)
    if g.kind == "dist2heaven":
        return dist2heaven(recall, false_alarm(m))
    return {"f1": f1, "precision": precision, "recall": recall}[g.kind]
