"""Scoring predictions: confusion metrics, dist2heaven, and effort-aware P_opt.

dist2heaven measures how far a (recall, false alarm) pair sits from the
ideal corner recall=1, false alarm=0 -- smaller is better.  P_opt asks a
different question: if developers inspect modules in the order the model
suggests (predicted-defective first, small files first), how quickly do
they encounter the defects, relative to the best and worst possible
inspection orders?  Larger is better and 0.5 is the random baseline.
"""

from defectkit import (accuracy, class_metrics, confusion, dist2heaven, evaluate,
                       goal, lift_curve, p_opt)

# --- threshold metrics from a confusion matrix -----------------------------
actual = [0, 0, 0, 0, 1, 1, 1, 1, 1, 1]
predicted = [0, 0, 0, 1, 1, 1, 1, 1, 0, 0]
m = confusion(actual, predicted, n_classes=2)
print("confusion counts:", m.counts)
precision, recall, f1 = class_metrics(m, j=1)
print(f"defective class: precision={precision:.3f} recall={recall:.3f} f1={f1:.3f}")
print(f"accuracy={accuracy(m):.3f}")

# --- distance to heaven -----------------------------------------------------
print("\ndist2heaven landscape:")
for r, fa in ((1.0, 0.0), (0.8, 0.3), (0.5, 0.5), (0.0, 1.0)):
    print(f"  recall={r:.1f} false_alarm={fa:.1f} -> {dist2heaven(r, fa):.4f}")

# --- effort-aware evaluation -----------------------------------------------
# three modules: two small defective ones and a big clean one
instances = [(1, 1), (2, 1), (7, 0)]  # (loc, actual label)

curve = lift_curve(instances, order=[0, 1, 2])
print("\nlift curve when inspecting small defective modules first:")
for x, y in curve.points:
    print(f"  {x:.0%} of the code read -> {y:.0%} of the defects found")
print(f"area under that curve: {curve.area():.3f}")

print("\nP_opt for different prediction vectors:")
for pred in ([1, 1, 0], [0, 1, 0], [0, 0, 1]):
    print(f"  predicted={pred} -> P_opt={p_opt(instances, pred):.4f}")

# --- one entry point for every goal ----------------------------------------
locs = [loc for loc, _ in instances]
labels = [lab for _, lab in instances]
imperfect = [0, 1, 0]  # misses the first defective module
print("\nevaluate() dispatches on the goal (for an imperfect prediction):")
for kind in ("accuracy", "f1", "dist2heaven", "p_opt"):
    g = goal(kind)
    value = evaluate(g, labels, imperfect, locs)
    print(f"  {kind:12s} ({g.direction:8s}) = {value:.4f}")
