"""Experiment orchestration: version-based runs, tuning workflows, and reports.

A run walks (dataset x learner x repeat) cells.  Tuned cells split the
training data 80/20 into new-training and tuning sets, let differential
evolution pick parameters by the goal score on the tuning set, refit the
winner on new-training, and score it once on the held-out test set.  The
learner's defaults are planted in DE's initial population, so the tuned
score on the tuning split can never lose to the defaults there.  All
randomness flows from the experiment seed through a documented mixing
function, which makes whole runs byte-reproducible.
"""

from __future__ import annotations

import io
import json
import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import learners, smote, tuner
from .dataset import Dataset, kfold, random_split
from .errors import ConfigError, DegenerateDataError
from .metrics import GoalSpec, evaluate, goal as make_goal
from .smote import SmoteConfig

SMOTE_SPACE = tuner.ParamSpace((
    tuner.ParamSpec("k", tuner.INTEGER, 1, 20, default=5),
    tuner.ParamSpec("m", tuner.CATEGORICAL, values=smote.M_CHOICES, default=50),
    tuner.ParamSpec("r", tuner.CONTINUOUS, 0.1, 5.0, default=2.0),
))

_MASK64 = (1 << 64) - 1


def derive_seed(seed: int, index: int) -> int:
    """Independent per-cell seed: splitmix64 finaliser over (seed, index)."""
    z = ((seed * 0x9E3779B97F4A7C15) + index + 1) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & 0xFFFFFFFF


@dataclass
class ExperimentSpec:
    """One experiment: datasets resolved to (train, test) pairs, plus knobs."""

    datasets: dict[str, tuple[Dataset, Dataset]]
    learners: list[learners.LearnerSpec]
    goal: GoalSpec
    repeats: int = 1
    seed: int = 0
    tune_fraction: float = 0.8
    folds: int = 10
    de: tuner.DEConfig | None = None
    preprocess: SmoteConfig | str | None = None

    def __post_init__(self):
        if self.repeats < 1:
            raise ConfigError("repeats must be at least 1")
        if not self.datasets:
            raise ConfigError("no datasets configured")
        if not self.learners:
            raise ConfigError("no learners configured")
        if isinstance(self.preprocess, str) and self.preprocess != "smotuned":
            raise ConfigError(f"unknown preprocess {self.preprocess!r}")


@dataclass
class ResultRow:
    dataset: str
    method: str
    repeat: int
    score: float
    duration: float
    tunings: dict | None = None
    evaluations: int | None = None
    default_tune_score: float | None = None
    best_tune_score: float | None = None


@dataclass
class ExperimentResult:
    goal: GoalSpec
    rows: list[ResultRow] = field(default_factory=list)
    aggregate_kind: str = "median"

    @property
    def datasets(self) -> list[str]:
        return list(dict.fromkeys(r.dataset for r in self.rows))

    @property
    def methods(self) -> list[str]:
        return list(dict.fromkeys(r.method for r in self.rows))

    def cell_scores(self, dataset: str, method: str) -> list[float]:
        return [r.score for r in self.rows if r.dataset == dataset and r.method == method]

    def aggregates(self) -> dict[tuple[str, str], float]:
        reducer = np.median if self.aggregate_kind == "median" else np.mean
        return {(d, m): float(reducer(self.cell_scores(d, m)))
                for d in self.datasets for m in self.methods if self.cell_scores(d, m)}

    def runtimes(self) -> dict[tuple[str, str], float]:
        out = {}
        for d in self.datasets:
            for m in self.methods:
                cells = [r.duration for r in self.rows if r.dataset == d and r.method == m]
                if cells:
                    out[(d, m)] = float(np.median(cells))
        return out

    @property
    def tuned(self) -> bool:
        return any(r.tunings is not None for r in self.rows)

    def to_json(self) -> str:
        payload = {
            "goal": self.goal.kind,
            "aggregate_kind": self.aggregate_kind,
            "rows": [vars(r) for r in self.rows],
        }
        return json.dumps(payload, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentResult":
        payload = json.loads(text)
        rows = [ResultRow(**r) for r in payload["rows"]]
        return cls(make_goal(payload["goal"]), rows, payload["aggregate_kind"])


def _score_on_test(model, test: Dataset, g: GoalSpec) -> float:
    """The single point where a model touches held-out test data."""
    predicted, _ = learners.predict_dataset(model, test)
    return evaluate(g, test.labels, predicted, test.locs)


def _score_on(model, data: Dataset, g: GoalSpec) -> float:
    predicted, _ = learners.predict_dataset(model, data)
    return evaluate(g, data.labels, predicted, data.locs)


def run_untuned(spec: ExperimentSpec) -> ExperimentResult:
    """Fit each learner with its given parameters; no tuning stage."""
    if spec.de is not None:
        raise ConfigError("run_untuned takes a spec without a tuning section")
    result = ExperimentResult(spec.goal)
    cell = 0
    for name, (train, test) in spec.datasets.items():
        for lspec in spec.learners:
            for repeat in range(spec.repeats):
                seed = derive_seed(spec.seed, cell)
                cell += 1
                start = time.perf_counter()
                fit_data = train
                if isinstance(spec.preprocess, SmoteConfig):
                    fit_data = smote.apply(train, replace(spec.preprocess, seed=seed))
                model = learners.fit(lspec, fit_data, seed, goal=spec.goal)
                score = _score_on_test(model, test, spec.goal)
                result.rows.append(ResultRow(name, lspec.kind, repeat, score,
                                             time.perf_counter() - start))
    return result


def _tuned_cell(lspec, new_train, tune_set, test, g, de_cfg, seed):
    """DE over the learner's own parameter space; returns one scored row body."""
    space = learners.param_space(lspec.kind)
    calls = 0

    def objective(candidate: tuner.Candidate) -> float:
        nonlocal calls
        calls += 1
        model = learners.fit(learners.LearnerSpec(lspec.kind, candidate.tunings),
                             new_train, seed, goal=g)
        return _score_on(model, tune_set, g)

    run = tuner.run_de(space, objective, g.direction, replace(de_cfg, seed=seed),
                       seed_candidates=[lspec.resolved()])
    assert calls == run.evaluations
    winner = learners.LearnerSpec(lspec.kind, run.best.tunings)
    model = learners.fit(winner, new_train, seed, goal=g)
    return {
        "score": _score_on_test(model, test, g),
        "tunings": dict(run.best.tunings),
        "evaluations": run.evaluations,
        "default_tune_score": run.initial_scores[0],
        "best_tune_score": run.best.score,
    }


def run_tuned(spec: ExperimentSpec) -> ExperimentResult:
    """Repeat (split 80/20, tune by DE, refit, test) and aggregate by median."""
    if spec.de is None:
        raise ConfigError("run_tuned needs a DE configuration")
    result = ExperimentResult(spec.goal)
    cell = 0
    for name, (train, test) in spec.datasets.items():
        for lspec in spec.learners:
            for repeat in range(spec.repeats):
                seed = derive_seed(spec.seed, cell)
                cell += 1
                start = time.perf_counter()
                new_train, tune_set = random_split(train, spec.tune_fraction, seed)
                if isinstance(spec.preprocess, SmoteConfig):
                    new_train = smote.apply(new_train, replace(spec.preprocess, seed=seed))
                body = _tuned_cell(lspec, new_train, tune_set, test, spec.goal, spec.de, seed)
                result.rows.append(ResultRow(name, lspec.kind, repeat,
                                             duration=time.perf_counter() - start, **body))
    return result


def run_kfold_tuned(spec: ExperimentSpec) -> ExperimentResult:
    """Tune once per fold (fold = tuning data, rest = new training); report means."""
    if spec.de is None:
        raise ConfigError("run_kfold_tuned needs a DE configuration")
    result = ExperimentResult(spec.goal, aggregate_kind="mean")
    cell = 0
    for name, (train, test) in spec.datasets.items():
        for lspec in spec.learners:
            base_seed = derive_seed(spec.seed, cell)
            cell += 1
            folds = kfold(train, spec.folds, base_seed)
            for fold_index, (new_train, tune_set) in enumerate(folds):
                seed = derive_seed(base_seed, fold_index)
                start = time.perf_counter()
                body = _tuned_cell(lspec, new_train, tune_set, test, spec.goal, spec.de, seed)
                result.rows.append(ResultRow(name, lspec.kind, fold_index,
                                             duration=time.perf_counter() - start, **body))
    return result


def run_smotuned(spec: ExperimentSpec) -> ExperimentResult:
    """Tune the SMOTE preprocessor (k, m, r) by DE; learner parameters stay fixed."""
    if spec.de is None:
        raise ConfigError("run_smotuned needs a DE configuration")
    if spec.preprocess != "smotuned":
        raise ConfigError('run_smotuned needs preprocess="smotuned"')
    result = ExperimentResult(spec.goal)
    cell = 0
    for name, (train, test) in spec.datasets.items():
        for lspec in spec.learners:
            for repeat in range(spec.repeats):
                seed = derive_seed(spec.seed, cell)
                cell += 1
                start = time.perf_counter()
                new_train, tune_set = random_split(train, spec.tune_fraction, seed)
                calls = 0

                def objective(candidate: tuner.Candidate) -> float:
                    nonlocal calls
                    calls += 1
                    cfg = SmoteConfig(candidate.tunings["k"], candidate.tunings["m"],
                                      candidate.tunings["r"], seed)
                    balanced = smote.apply(new_train, cfg)
                    model = learners.fit(lspec, balanced, seed, goal=spec.goal)
                    return _score_on(model, tune_set, spec.goal)

                try:
                    run = tuner.run_de(SMOTE_SPACE, objective, spec.goal.direction,
                                       replace(spec.de, seed=seed),
                                       seed_candidates=[SMOTE_SPACE.defaults()])
                except DegenerateDataError as exc:
                    raise DegenerateDataError(f"dataset {name!r}: {exc}") from exc
                assert calls == run.evaluations
                best = run.best.tunings
                balanced = smote.apply(new_train, SmoteConfig(best["k"], best["m"],
                                                              best["r"], seed))
                model = learners.fit(lspec, balanced, seed, goal=spec.goal)
                result.rows.append(ResultRow(
                    name, lspec.kind + "+smotuned", repeat,
                    score=_score_on_test(model, test, spec.goal),
                    duration=time.perf_counter() - start,
                    tunings=dict(best), evaluations=run.evaluations,
                    default_tune_score=run.initial_scores[0],
                    best_tune_score=run.best.score))
    return result


def _best_methods(result: ExperimentResult, aggregates) -> dict[str, str]:
    best = {}
    for dataset in result.datasets:
        scored = [(m, aggregates[(dataset, m)]) for m in result.methods
                  if (dataset, m) in aggregates]
        pick = scored[0]
        for entry in scored[1:]:
            if result.goal.better(entry[1], pick[1]):
                pick = entry
        best[dataset] = pick[0]
    return best


def report(result: ExperimentResult, fmt: str = "table",
           include_runtime: bool | None = None) -> str:
    """Render the aggregate grid; scores print x100 at one decimal.

    Runtime is reported for tuned runs by default and can be forced either
    way; deterministic reports need include_runtime=False.
    """
    if not result.rows:
        raise ValueError("cannot report an empty result")
    if fmt not in ("table", "csv"):
        raise ValueError(f"unknown report format {fmt!r}")
    if include_runtime is None:
        include_runtime = result.tuned
    aggregates = result.aggregates()
    best = _best_methods(result, aggregates)
    runtimes = result.runtimes()

    if fmt == "csv":
        out = io.StringIO()
        header = "dataset,method,score,best"
        out.write(header + (",runtime_seconds\n" if include_runtime else "\n"))
        for dataset in result.datasets:
            for method in result.methods:
                if (dataset, method) not in aggregates:
                    continue
                line = (f"{dataset},{method},{aggregates[(dataset, method)] * 100:.1f},"
                        f"{1 if best[dataset] == method else 0}")
                if include_runtime:
                    line += f",{runtimes[(dataset, method)]:.3f}"
                out.write(line + "\n")
        return out.getvalue()

    n_repeats = max(r.repeat for r in result.rows) + 1
    width = max(7, *(len(m) for m in result.methods))
    name_width = max(7, *(len(d) for d in result.datasets))
    lines = [f"goal: {result.goal.kind} ({result.goal.direction}); "
             f"{result.aggregate_kind} over {n_repeats} repeats; scores x100, * = best"]
    lines.append(" | ".join(["dataset".ljust(name_width)]
                            + [m.rjust(width) for m in result.methods]))
    lines.append("-+-".join(["-" * name_width] + ["-" * width] * len(result.methods)))
    for dataset in result.datasets:
        cells = []
        for method in result.methods:
            if (dataset, method) not in aggregates:
                cells.append("-".rjust(width))
                continue
            mark = "*" if best[dataset] == method else ""
            cells.append(f"{aggregates[(dataset, method)] * 100:.1f}{mark}".rjust(width))
        lines.append(" | ".join([dataset.ljust(name_width)] + cells))
    if include_runtime:
        lines.append("")
        lines.append("runtime seconds (median per dataset x method)")
        for dataset in result.datasets:
            cells = [f"{runtimes[(dataset, m)]:.3f}".rjust(width)
                     for m in result.methods if (dataset, m) in runtimes]
            lines.append(" | ".join([dataset.ljust(name_width)] + cells))
    return "\n".join(lines) + "\n"


def parse_report_csv(text: str) -> list[tuple[str, str, float, bool]]:
    """Read back a csv report: (dataset, method, score, best) per line."""
    rows = []
    lines = text.strip().splitlines()
    for line in lines[1:]:
        parts = line.split(",")
        rows.append((parts[0], parts[1], float(parts[2]), parts[3] == "1"))
    return rows
