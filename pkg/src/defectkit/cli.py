"""Batch command line: untuned / tune / kfold-tune / smotuned / report.

Datasets come from a JSON manifest mapping project -> ordered version CSVs
(oldest first; the newest file is the test set, the rest merge into the
training set).  Every flag can also come from a JSON config file via
--config; explicit flags win.  Exit codes: 0 success, 2 configuration
error, 1 runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .dataset import Manifest
from .errors import ConfigError, DefectkitError, SchemaError
from .harness import (ExperimentResult, ExperimentSpec, report, run_kfold_tuned,
                      run_smotuned, run_tuned, run_untuned)
from .learners import KINDS, LearnerSpec
from .metrics import goal as make_goal
from .tuner import DEConfig

GOAL_NAMES = {"d2h": "dist2heaven", "popt": "p_opt", "f1": "f1", "acc": "accuracy"}


def _add_common(parser: argparse.ArgumentParser, tuned: bool) -> None:
    parser.add_argument("--config", type=Path, help="JSON config file; flags override it")
    parser.add_argument("--manifest", type=Path, help="JSON manifest of project version CSVs")
    parser.add_argument("--goal", choices=sorted(GOAL_NAMES), help="optimisation goal")
    parser.add_argument("--learner", help="comma-separated learner kinds "
                                          f"(choose from {', '.join(KINDS)})")
    parser.add_argument("--repeats", type=int, help="independent repeats to aggregate")
    parser.add_argument("--seed", type=int, help="master random seed")
    parser.add_argument("--out", type=Path, help="directory for results.json and the report")
    parser.add_argument("--format", choices=("table", "csv"), help="report format")
    if tuned:
        parser.add_argument("--np", type=int, dest="de_np", help="DE population size")
        parser.add_argument("--f", type=float, dest="de_f", help="DE extrapolation factor")
        parser.add_argument("--cr", type=float, dest="de_cr", help="DE crossover probability")
        parser.add_argument("--life", type=int, dest="de_life", help="DE stagnation budget")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="defectkit",
                                     description="Effort-aware defect prediction experiments")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_common(sub.add_parser("untuned", help="fit learners with their given parameters"),
                tuned=False)
    _add_common(sub.add_parser("tune", help="tune learner parameters by DE on an 80/20 split"),
                tuned=True)
    kf = sub.add_parser("kfold-tune", help="tune with k-fold carving of the training data")
    _add_common(kf, tuned=True)
    kf.add_argument("--folds", type=int, help="number of folds (default 10)")
    _add_common(sub.add_parser("smotuned", help="tune the SMOTE preprocessor by DE"),
                tuned=True)
    rep = sub.add_parser("report", help="re-render a saved results.json")
    rep.add_argument("--out", type=Path, required=True,
                     help="directory holding results.json")
    rep.add_argument("--format", choices=("table", "csv"), default="table")
    rep.add_argument("--runtime", action="store_true", help="force the runtime section on")
    return parser


def _setting(args, config: dict, name: str, default=None):
    value = getattr(args, name, None)
    if value is not None:
        return value
    return config.get(name, default)


def _load_config(args) -> dict:
    if getattr(args, "config", None) is None:
        return {}
    try:
        return json.loads(Path(args.config).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {args.config}: {exc}") from None


def _build_spec(args, config: dict, command: str) -> ExperimentSpec:
    manifest_path = _setting(args, config, "manifest")
    if manifest_path is None:
        raise ConfigError("a --manifest (or config manifest entry) is required")
    datasets = Manifest.load(manifest_path).assemble()

    goal_name = _setting(args, config, "goal", "d2h")
    learner_arg = _setting(args, config, "learner", "fft")
    if isinstance(learner_arg, str):
        learner_kinds = [k.strip() for k in learner_arg.split(",") if k.strip()]
    else:
        learner_kinds = list(learner_arg)
    try:
        learner_specs = [LearnerSpec(kind) for kind in learner_kinds]
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    de = None
    if command in ("tune", "kfold-tune", "smotuned"):
        de_cfg = config.get("de", {})

        def de_knob(flag, key, default):
            value = getattr(args, flag, None)
            return value if value is not None else de_cfg.get(key, default)

        try:
            de = DEConfig(np=de_knob("de_np", "np", 10), f=de_knob("de_f", "f", 0.75),
                          cr=de_knob("de_cr", "cr", 0.3), life=de_knob("de_life", "life", 5))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    return ExperimentSpec(
        datasets=datasets,
        learners=learner_specs,
        goal=make_goal(GOAL_NAMES[goal_name]),
        repeats=_setting(args, config, "repeats", 1),
        seed=_setting(args, config, "seed", 0),
        folds=_setting(args, config, "folds", 10) if command == "kfold-tune" else 10,
        de=de,
        preprocess="smotuned" if command == "smotuned" else None,
    )


def _emit(result: ExperimentResult, args, config: dict) -> None:
    fmt = _setting(args, config, "format", "table")
    rendered = report(result, fmt)
    out_dir = _setting(args, config, "out")
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "results.json").write_text(result.to_json(), encoding="utf-8")
        suffix = "csv" if fmt == "csv" else "txt"
        (out_dir / f"report.{suffix}").write_text(rendered, encoding="utf-8")
    sys.stdout.write(rendered)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    runners = {"untuned": run_untuned, "tune": run_tuned,
               "kfold-tune": run_kfold_tuned, "smotuned": run_smotuned}
    try:
        if args.command == "report":
            results_file = args.out / "results.json"
            if not results_file.exists():
                raise ConfigError(f"no results.json under {args.out}")
            result = ExperimentResult.from_json(results_file.read_text(encoding="utf-8"))
            sys.stdout.write(report(result, args.format,
                                    include_runtime=True if args.runtime else None))
            return 0
        config = _load_config(args)
        spec = _build_spec(args, config, args.command)
        result = runners[args.command](spec)
        _emit(result, args, config)
        return 0
    except (ConfigError, SchemaError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (DefectkitError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
