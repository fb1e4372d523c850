import json

import numpy as np

from defectkit.cli import main
from defectkit.harness import parse_report_csv


def make_project(tmp_path, n_per_version=60, seed=0):
    """Three version CSVs with a planted signal plus a manifest pointing at them."""
    rng = np.random.default_rng(seed)
    names = ["p-1.0.csv", "p-2.0.csv", "p-3.0.csv"]
    for i, name in enumerate(names):
        labels = rng.integers(0, 2, n_per_version)
        wmc = labels * 8 + rng.random(n_per_version)
        rfc = rng.random(n_per_version)
        loc = rng.integers(10, 300, n_per_version)
        lines = ["wmc,rfc,loc,bug\n"]
        lines += [f"{wmc[j]:.4f},{rfc[j]:.4f},{loc[j]},{labels[j]}\n"
                  for j in range(n_per_version)]
        (tmp_path / name).write_text("".join(lines), encoding="utf-8")
    manifest = tmp_path / "manifest.json"
    manifest.write_text(json.dumps({"p": names}), encoding="utf-8")
    return manifest


class TestUntuned:
    def test_runs_and_writes_outputs(self, tmp_path, capsys):
        manifest = make_project(tmp_path)
        out = tmp_path / "out"
        code = main(["untuned", "--manifest", str(manifest), "--goal", "d2h",
                     "--learner", "fft,cart", "--seed", "1", "--out", str(out)])
        assert code == 0
        assert (out / "results.json").exists()
        assert (out / "report.txt").exists()
        printed = capsys.readouterr().out
        assert "dist2heaven" in printed and "fft" in printed and "cart" in printed

    def test_csv_format(self, tmp_path, capsys):
        manifest = make_project(tmp_path)
        out = tmp_path / "out"
        code = main(["untuned", "--manifest", str(manifest), "--format", "csv",
                     "--learner", "fft", "--out", str(out)])
        assert code == 0
        rows = parse_report_csv((out / "report.csv").read_text(encoding="utf-8"))
        assert rows[0][0] == "p" and rows[0][1] == "fft"


class TestTune:
    def test_tune_and_report_round_trip(self, tmp_path, capsys):
        manifest = make_project(tmp_path)
        out = tmp_path / "out"
        code = main(["tune", "--manifest", str(manifest), "--learner", "cart",
                     "--goal", "acc", "--repeats", "2", "--seed", "3",
                     "--np", "5", "--life", "2", "--out", str(out)])
        assert code == 0
        capsys.readouterr()
        code = main(["report", "--out", str(out), "--format", "csv"])
        assert code == 0
        rendered = capsys.readouterr().out
        assert rendered.startswith("dataset,method,score,best")

    def test_goal_popt(self, tmp_path, capsys):
        manifest = make_project(tmp_path)
        code = main(["tune", "--manifest", str(manifest), "--learner", "fft",
                     "--goal", "popt", "--np", "5", "--life", "1", "--seed", "2"])
        assert code == 0
        assert "p_opt" in capsys.readouterr().out


class TestKfoldTune:
    def test_runs(self, tmp_path, capsys):
        manifest = make_project(tmp_path)
        code = main(["kfold-tune", "--manifest", str(manifest), "--learner", "cart",
                     "--folds", "2", "--np", "5", "--life", "1", "--seed", "4"])
        assert code == 0
        assert "mean" in capsys.readouterr().out


class TestSmotuned:
    def test_runs(self, tmp_path, capsys):
        manifest = make_project(tmp_path)
        code = main(["smotuned", "--manifest", str(manifest), "--learner", "cart",
                     "--np", "5", "--life", "1", "--seed", "5"])
        assert code == 0
        assert "cart+smotuned" in capsys.readouterr().out


class TestConfigFile:
    def test_config_supplies_settings(self, tmp_path, capsys):
        manifest = make_project(tmp_path)
        config = tmp_path / "exp.json"
        config.write_text(json.dumps({
            "manifest": str(manifest), "goal": "acc", "learner": "knn",
            "seed": 9, "de": {"np": 5, "life": 1},
        }), encoding="utf-8")
        code = main(["untuned", "--config", str(config)])
        assert code == 0
        assert "knn" in capsys.readouterr().out

    def test_config_supplies_format_and_out(self, tmp_path, capsys):
        manifest = make_project(tmp_path)
        out = tmp_path / "from-config"
        config = tmp_path / "exp.json"
        config.write_text(json.dumps({
            "manifest": str(manifest), "learner": "fft",
            "format": "csv", "out": str(out),
        }), encoding="utf-8")
        assert main(["untuned", "--config", str(config)]) == 0
        assert (out / "report.csv").exists()

    def test_flags_override_config(self, tmp_path, capsys):
        manifest = make_project(tmp_path)
        config = tmp_path / "exp.json"
        config.write_text(json.dumps({"manifest": str(manifest), "learner": "knn"}),
                          encoding="utf-8")
        code = main(["untuned", "--config", str(config), "--learner", "cart"])
        assert code == 0
        out = capsys.readouterr().out
        assert "cart" in out and "knn" not in out


class TestErrorPaths:
    def test_missing_manifest_is_config_error(self, capsys):
        assert main(["untuned", "--goal", "d2h"]) == 2

    def test_nonexistent_manifest_file(self, tmp_path):
        assert main(["untuned", "--manifest", str(tmp_path / "nope.json")]) == 1

    def test_bad_learner_kind(self, tmp_path):
        manifest = make_project(tmp_path)
        assert main(["untuned", "--manifest", str(manifest),
                     "--learner", "perceptron"]) == 2

    def test_single_version_project(self, tmp_path):
        (tmp_path / "p-1.0.csv").write_text("wmc,loc,bug\n1,2,0\n", encoding="utf-8")
        manifest = tmp_path / "manifest.json"
        manifest.write_text(json.dumps({"p": ["p-1.0.csv"]}), encoding="utf-8")
        assert main(["untuned", "--manifest", str(manifest)]) == 2

    def test_degenerate_training_data_is_runtime_error(self, tmp_path):
        for name in ("p-1.0.csv", "p-2.0.csv"):
            rows = "".join(f"{i},1,{10 + i},0\n" for i in range(12))
            (tmp_path / name).write_text("wmc,rfc,loc,bug\n" + rows, encoding="utf-8")
        manifest = tmp_path / "manifest.json"
        manifest.write_text(json.dumps({"p": ["p-1.0.csv", "p-2.0.csv"]}),
                            encoding="utf-8")
        assert main(["untuned", "--manifest", str(manifest), "--learner", "cart"]) == 1

    def test_report_without_results(self, tmp_path):
        assert main(["report", "--out", str(tmp_path)]) == 2
