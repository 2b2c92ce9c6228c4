import json
import re
import subprocess
import sys

import numpy as np
import pytest

from driftlab.cli import main
from driftlab.experiment import (
    ConfigError,
    analyze_results,
    benchmark_grid,
    read_results,
    score_matrix,
    validate_config,
    write_results,
)
from driftlab.plotting import cd_diagram, line_chart, radar_chart


def write_config(tmp_path, raw, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(raw))
    return path


def tiny(n_streams=1, methods=("HDWE",), metrics=("bac",), n_chunks=3, **stream_kw):
    return {
        "seed": 5,
        "metrics": list(metrics),
        "streams": [dict({"id": f"s{i}", "type": "synthetic", "n_chunks": n_chunks, "chunk_size": 60,
                          "n_drifts": 1}, **stream_kw) for i in range(n_streams)],
        "methods": [{"id": f"{m}-GNB", "ensemble": m, "base": "GNB"} for m in methods],
    }


def payloads(out):
    files = [out / "results.csv", out / "manifest.json"] + sorted((out / "analysis").glob("*"))
    files += sorted((out / "plots").glob("*")) if (out / "plots").exists() else []
    return {p.relative_to(out).as_posix(): p.read_bytes() for p in files}


class TestRun:
    def test_protocol_arithmetic(self, tmp_path):
        cfg = write_config(tmp_path, tiny())
        assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "o"), "--jobs", "1"]) == 0
        lines = (tmp_path / "o" / "results.csv").read_text().splitlines()
        assert lines[0] == "stream_id,method_id,chunk_index,metric,value"
        assert len(lines) == 3
        assert [ln.split(",")[2] for ln in lines[1:]] == ["1", "2"]

    def test_rows_sorted_and_rerun_identical(self, tmp_path):
        raw = tiny(n_streams=2, methods=("SEA", "HDWE"), metrics=("recall", "bac"), n_chunks=4)
        cfg = write_config(tmp_path, raw)
        for out in ("a", "b"):
            assert main(["run", "--config", str(cfg), "--out", str(tmp_path / out), "--jobs", "1"]) == 0
        a, b = payloads(tmp_path / "a"), payloads(tmp_path / "b")
        assert a == b
        rows = read_results(tmp_path / "a" / "results.csv")
        keys = [(s, m, t, metric) for s, m, t, metric, _ in rows]
        assert keys == sorted(keys) and len(rows) == 2 * 2 * 3 * 2

    def test_manifest(self, tmp_path):
        cfg = write_config(tmp_path, tiny(methods=("HDWE", "AWE")))
        main(["run", "--config", str(cfg), "--out", str(tmp_path / "o"), "--jobs", "1"])
        m = json.loads((tmp_path / "o" / "manifest.json").read_text())
        assert len(m["config_hash"]) == 64 and m["seed"] == 5
        assert {"driftlab", "numpy", "scipy", "python"} <= set(m["versions"])
        assert [r["status"] for r in m["runs"]] == ["ok", "ok"]
        assert m["streams"][0]["drift_positions"] == [2]
        assert isinstance(m["streams"][0]["seed"], int)
        assert not (tmp_path / "o" / "timings.csv").exists()

    def test_seed_override_changes_results(self, tmp_path):
        cfg = write_config(tmp_path, tiny(n_chunks=4))
        main(["run", "--config", str(cfg), "--out", str(tmp_path / "a"), "--jobs", "1"])
        main(["run", "--config", str(cfg), "--out", str(tmp_path / "b"), "--jobs", "1", "--seed", "99"])
        assert (tmp_path / "a" / "results.csv").read_bytes() != (tmp_path / "b" / "results.csv").read_bytes()

    def test_timings_opt_in(self, tmp_path):
        cfg = write_config(tmp_path, tiny())
        main(["run", "--config", str(cfg), "--out", str(tmp_path / "o"), "--jobs", "1", "--timings"])
        lines = (tmp_path / "o" / "timings.csv").read_text().splitlines()
        assert lines[0] == "stream_id,method_id,chunk_index,seconds" and len(lines) == 4

    def test_dry_run_benchmark_grid(self, tmp_path, capsys):
        cfg = write_config(tmp_path, benchmark_grid())
        assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "o"), "--dry-run"]) == 0
        m = json.loads((tmp_path / "o" / "manifest.json").read_text())
        assert len(m["streams"]) == 84 and len(m["methods"]) == 7 and len(m["runs"]) == 588
        assert "planned 588 runs" in capsys.readouterr().out

    def test_bad_config_exit_2(self, tmp_path, capsys):
        raw = tiny()
        raw["streams"][0]["minority_ratio"] = 0.7
        raw["methods"][0]["base"] = "SVC"
        cfg = write_config(tmp_path, raw)
        assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2
        err = capsys.readouterr().err
        assert "streams.0.minority_ratio" in err and "methods.0.base" in err

    @pytest.mark.parametrize("text", ["{not json", json.dumps({"streams": [], "methods": []})])
    def test_unparseable_config_exit_2(self, tmp_path, text):
        (tmp_path / "c.json").write_text(text)
        assert main(["run", "--config", str(tmp_path / "c.json")]) == 2

    def test_missing_config_exit_2(self, tmp_path):
        assert main(["run", "--config", str(tmp_path / "nope.json")]) == 2

    def test_failed_run_exit_1(self, tmp_path, capsys):
        raw = tiny()
        raw["streams"].append({"id": "gone", "type": "chunked", "path": "missing.csv"})
        cfg = write_config(tmp_path, raw)
        assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "o"), "--jobs", "1"]) == 1
        m = json.loads((tmp_path / "o" / "manifest.json").read_text())
        status = {r["stream"]: r["status"] for r in m["runs"]}
        assert status == {"gone": "failed", "s0": "ok"}
        assert len(read_results(tmp_path / "o" / "results.csv")) == 2
        assert "FAILED gone" in capsys.readouterr().err

    def test_duplicate_ids_rejected(self):
        raw = tiny(methods=("HDWE", "HDWE"))
        with pytest.raises(ConfigError, match="duplicate"):
            validate_config(raw)

    def test_chunked_and_dataset_streams(self, tmp_path):
        gen_cfg = write_config(tmp_path, tiny(n_chunks=4), "gen.json")
        assert main(["gen", "--config", str(gen_cfg), "--out", str(tmp_path)]) == 0
        assert (tmp_path / "streams" / "s0.csv").exists()
        (tmp_path / "d.csv").write_text("a,b,c\n" + "\n".join(f"{i},{i % 7},{i % 4}" for i in range(40)) + "\n")
        raw = {
            "metrics": ["bac"],
            "streams": [{"id": "saved", "type": "chunked", "path": "streams/s0.csv"},
                        {"id": "real", "type": "dataset", "path": "d.csv", "format": "csv",
                         "group": [0], "chunk_size": 10}],
            "methods": [{"id": "h", "ensemble": "HDWE", "base": "KNN", "k": 3},
                        {"id": "t", "ensemble": "AWE", "base": "HDDT", "max_depth": 3}],
        }
        cfg = write_config(tmp_path, raw, "run.json")
        assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "o"), "--jobs", "1"]) == 0
        direct = write_config(tmp_path, dict(tiny(n_chunks=4), methods=[raw["methods"][0]]), "direct.json")
        main(["run", "--config", str(direct), "--out", str(tmp_path / "p"), "--jobs", "1"])
        saved = [v for s, m, _, _, v in read_results(tmp_path / "o" / "results.csv") if s == "saved" and m == "h"]
        fresh = [v for *_, v in read_results(tmp_path / "p" / "results.csv")]
        assert saved == fresh


class TestAnalyze:
    @pytest.fixture
    def results(self, tmp_path):
        raw = tiny(n_streams=3, methods=("HDWE", "SEA"), metrics=("bac", "recall"), n_chunks=4)
        cfg = write_config(tmp_path, raw)
        main(["run", "--config", str(cfg), "--out", str(tmp_path / "o"), "--jobs", "1"])
        return tmp_path / "o"

    def test_single_metric_single_summary(self, results):
        assert main(["analyze", "--out", str(results), "--metric", "recall"]) == 0
        assert sorted(p.name for p in (results / "analysis").glob("summary_*.json")) == ["summary_recall.json"]

    def test_all_metrics(self, results):
        main(["analyze", "--out", str(results), "--alpha", "0.10"])
        s = json.loads((results / "analysis" / "summary_bac.json").read_text())
        assert s["alpha"] == 0.10 and s["k"] == 2 and s["n_streams"] == 3
        assert sum(s["avg_ranks"]) == pytest.approx(3.0)
        assert (results / "analysis" / "report.txt").read_text().startswith("== bac")

    def test_dominant_method_ranks(self, tmp_path):
        rows = [(f"s{i}", m, 1, "bac", v) for i in range(4) for m, v in (("good", 0.9), ("bad", 0.2))]
        out = tmp_path / "r"
        out.mkdir()
        write_results(rows, out / "results.csv")
        (out / "manifest.json").write_text(json.dumps({
            "metrics": ["bac"], "alpha": 0.05,
            "methods": [{"id": "good"}, {"id": "bad"}],
            "streams": [{"id": f"s{i}"} for i in range(4)]}))
        summary = analyze_results(out)["bac"]
        assert summary.avg_ranks == [2.0, 1.0]
        assert "good" in (out / "analysis" / "report.txt").read_text()

    def test_missing_coverage_named(self, results):
        rows = [r for r in read_results(results / "results.csv") if not (r[0] == "s1" and r[1] == "SEA-GNB")]
        write_results(rows, results / "results.csv")
        assert main(["analyze", "--out", str(results)]) == 1
        with pytest.raises(Exception, match="s1 x SEA-GNB"):
            analyze_results(results)

    def test_score_matrix_means(self):
        rows = [("a", "m", 1, "bac", 0.0), ("a", "m", 2, "bac", 1.0), ("a", "n", 1, "bac", 0.25)]
        streams, methods, mat = score_matrix(rows, "bac")
        assert streams == ["a"] and methods == ["m", "n"] and mat.tolist() == [[0.5, 0.25]]


class TestPlot:
    def test_line_chart_points(self):
        svg = line_chart({"a": np.linspace(0, 1, 199), "b": np.zeros(199)}, "t", [33, 67], chunk_offset=1)
        polys = re.findall(r'class="series" data-method="(\w)"[^>]*points="([^"]*)"', svg)
        assert [m for m, _ in polys] == ["a", "b"]
        assert all(len(p.split()) == 199 for _, p in polys)
        assert svg.count('class="drift"') == 2

    def test_cd_single_bar(self):
        geo = {"axis": {"min": 1, "max": 3}, "cd": 2.5, "alpha": 0.05,
               "methods": [{"name": "a", "rank": 1.5}, {"name": "b", "rank": 2.0}, {"name": "c", "rank": 2.5}],
               "bars": [{"methods": ["a", "b", "c"], "from": 1.5, "to": 2.5}]}
        assert cd_diagram(geo).count('class="group-bar"') == 1

    def test_radar_hexagon(self):
        axes = ["bac", "f1", "gmean", "precision", "recall", "specificity"]
        svg = radar_chart({"m": [0.5] * 6}, axes)
        lines = re.findall(r'class="radar-axis"[^>]*x1="([-\d.]+)" y1="([-\d.]+)" x2="([-\d.]+)" y2="([-\d.]+)"', svg)
        assert len(lines) == 6
        angles = [np.degrees(np.arctan2(float(y2) - float(y1), float(x2) - float(x1))) for x1, y1, x2, y2 in lines]
        steps = np.mod(np.diff(angles), 360)
        assert np.allclose(steps, 60, atol=0.05)

    def test_plot_pipeline(self, tmp_path):
        raw = tiny(n_streams=2, methods=("HDWE", "AWE", "SEA"),
                   metrics=("bac", "recall", "specificity"), n_chunks=5)
        cfg = write_config(tmp_path, raw)
        out = tmp_path / "o"
        main(["run", "--config", str(cfg), "--out", str(out), "--jobs", "1"])
        main(["analyze", "--out", str(out)])
        assert main(["plot", "--out", str(out)]) == 0
        names = sorted(p.name for p in (out / "plots").glob("*.svg"))
        assert "lines_s0_bac.svg" in names and "radar_s1.svg" in names and "cd_recall.svg" in names
        svg = (out / "plots" / "lines_s0_bac.svg").read_text()
        assert svg.count('class="series"') == 3
        assert all(len(p.split()) == 4 for p in re.findall(r'class="series"[^>]*points="([^"]*)"', svg))

    def test_plot_empty_results_warns(self, tmp_path, caplog):
        assert main(["plot", "--out", str(tmp_path)]) == 0
        assert "nothing to plot" in caplog.text


def test_module_entry_point(tmp_path):
    cfg = write_config(tmp_path, tiny())
    proc = subprocess.run([sys.executable, "-m", "driftlab", "run", "--config", str(cfg),
                           "--out", str(tmp_path / "o"), "--jobs", "1"], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert "1/1 runs ok" in proc.stdout
