"""Effort-aware defect prediction toolkit.

Builds fast-and-frugal tree ensembles, tunes learners and preprocessors
with differential evolution, rebalances training data with SMOTE, and
scores everything with confusion-matrix and effort-aware metrics.
"""

from .dataset import (AttributeSchema, Dataset, Instance, Manifest, kfold, load_csv,
                      merge, random_split, write_csv)
from .fft import FFTEnsemble, FFTree, Range, build_tree, median_split, score_ranges
from .harness import (ExperimentResult, ExperimentSpec, ResultRow, report,
                      run_kfold_tuned, run_smotuned, run_tuned, run_untuned)
from .learners import LearnerSpec, Model, param_space, predict_dataset, svm_kernel_space
from .metrics import (ConfusionMatrix, GoalSpec, LiftCurve, accuracy, class_metrics,
                      confusion, dist2heaven, evaluate, goal, lift_curve, p_opt)
from .smote import SmoteConfig, minkowski
from .tuner import Candidate, DEConfig, ParamSpace, ParamSpec, extrapolate, init_population, optimize

__all__ = [
    "AttributeSchema", "Dataset", "Instance", "Manifest", "kfold", "load_csv", "merge",
    "random_split", "write_csv",
    "FFTEnsemble", "FFTree", "Range", "build_tree", "median_split", "score_ranges",
    "ExperimentResult", "ExperimentSpec", "ResultRow", "report", "run_kfold_tuned",
    "run_smotuned", "run_tuned", "run_untuned",
    "LearnerSpec", "Model", "param_space", "predict_dataset", "svm_kernel_space",
    "ConfusionMatrix", "GoalSpec", "LiftCurve", "accuracy", "class_metrics", "confusion",
    "dist2heaven", "evaluate", "goal", "lift_curve", "p_opt",
    "SmoteConfig", "minkowski",
    "Candidate", "DEConfig", "ParamSpace", "ParamSpec", "extrapolate", "init_population",
    "optimize",
]
