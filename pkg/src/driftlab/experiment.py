"""Declarative experiment grids: streams x methods -> long-format results.

A config is a JSON document validated against :data:`CONFIG_SCHEMA`::

    {
      "seed": 7,
      "metrics": ["bac", "recall"],
      "streams": [
        {"id": "sudden-10", "type": "synthetic", "minority_ratio": 0.1},
        {"id": "poker", "type": "dataset", "path": "poker.arff",
         "group": ["1", "2"], "chunk_size": 2000},
        {"id": "saved", "type": "chunked", "path": "streams/sudden-10.csv"}
      ],
      "methods": [{"id": "HDWE-GNB", "ensemble": "HDWE", "base": "GNB"}]
    }

Relative paths are resolved against the config file's directory. Synthetic
streams without an explicit ``seed`` get one derived from the global seed
and their position in the list.
"""
from __future__ import annotations

import copy
import csv
import hashlib
import io
import json
import logging
import os
import platform
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import jsonschema
import numpy as np
import scipy

from . import __version__
from .classifiers import BASE_CLASSIFIERS, make_classifier
from .ensembles import ENSEMBLES, make_ensemble
from .errors import InvalidInputError
from .evaluation import test_then_train
from .metrics import HD_METRIC, METRIC_NAMES
from .stats import cd_diagram_geometry, rank_summary
from .stream_io import DatasetSpec, load_dataset, read_stream, write_stream
from .streams import MINORITY_RATIOS, StreamConfig, generate_stream

log = logging.getLogger(__name__)

RESULTS_FILE = "results.csv"
MANIFEST_FILE = "manifest.json"
RESULTS_HEADER = ("stream_id", "method_id", "chunk_index", "metric", "value")

_SYNTHETIC_FIELDS = {
    "n_chunks": {"type": "integer", "minimum": 2},
    "chunk_size": {"type": "integer", "minimum": 1},
    "n_informative": {"type": "integer", "minimum": 1},
    "n_redundant": {"type": "integer", "minimum": 0},
    "n_drifts": {"type": "integer", "minimum": 0},
    "drift_kind": {"enum": ["sudden", "incremental"]},
    "imbalance_mode": {"enum": ["static", "dynamic"]},
    "minority_ratio": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 0.5},
    "seed": {"type": "integer", "minimum": 0},
    "n_clusters_per_class": {"type": "integer", "minimum": 1},
    "class_sep": {"type": "number", "exclusiveMinimum": 0},
    "label_sampling": {"enum": ["iid", "quota"]},
    "transition_width": {"type": "number", "exclusiveMinimum": 0},
}

CONFIG_SCHEMA = {
    "type": "object",
    "required": ["streams", "methods"],
    "additionalProperties": False,
    "properties": {
        "seed": {"type": "integer", "minimum": 0},
        "alpha": {"enum": [0.05, 0.10]},
        "jobs": {"type": "integer", "minimum": 1},
        "output": {"type": "string"},
        "metrics": {
            "type": "array", "minItems": 1, "uniqueItems": True,
            "items": {"enum": list(METRIC_NAMES) + [HD_METRIC]},
        },
        "streams": {
            "type": "array", "minItems": 1,
            "items": {
                "type": "object",
                "required": ["id", "type"],
                "properties": {
                    "id": {"type": "string", "pattern": r"^[A-Za-z0-9_.\-]+$"},
                    "type": {"enum": ["synthetic", "dataset", "chunked"]},
                },
                "allOf": [
                    {
                        "if": {"properties": {"type": {"const": "synthetic"}}},
                        "then": {
                            "properties": {"id": {}, "type": {}, **_SYNTHETIC_FIELDS},
                            "additionalProperties": False,
                        },
                    },
                    {
                        "if": {"properties": {"type": {"const": "dataset"}}},
                        "then": {
                            "required": ["path", "group"],
                            "additionalProperties": False,
                            "properties": {
                                "id": {}, "type": {},
                                "path": {"type": "string"},
                                "format": {"enum": ["arff", "csv"]},
                                "label_column": {"type": ["string", "integer"]},
                                "group": {"type": "array", "minItems": 1,
                                          "items": {"type": ["string", "integer"]}},
                                "classes": {"type": "array",
                                            "items": {"type": ["string", "integer"]}},
                                "chunk_size": {"type": "integer", "minimum": 1},
                                "expected_ratio": {"type": "number", "minimum": 0, "maximum": 0.5},
                            },
                        },
                    },
                    {
                        "if": {"properties": {"type": {"const": "chunked"}}},
                        "then": {
                            "required": ["path"],
                            "additionalProperties": False,
                            "properties": {"id": {}, "type": {}, "path": {"type": "string"}},
                        },
                    },
                ],
            },
        },
        "methods": {
            "type": "array", "minItems": 1,
            "items": {
                "type": "object",
                "required": ["id", "ensemble", "base"],
                "additionalProperties": False,
                "properties": {
                    "id": {"type": "string", "pattern": r"^[A-Za-z0-9_.\-]+$"},
                    "ensemble": {"enum": sorted(ENSEMBLES)},
                    "base": {"enum": list(BASE_CLASSIFIERS)},
                    "ensemble_size": {"type": "integer", "minimum": 1},
                    "folds": {"type": "integer", "minimum": 2},
                    "k": {"type": "integer", "minimum": 1},
                    "max_depth": {"type": "integer", "minimum": 0},
                    "min_samples_split": {"type": "integer", "minimum": 2},
                },
            },
        },
    },
}


class ConfigError(ValueError):
    """The experiment config is malformed; the message names the offending field."""


@dataclass
class ExperimentConfig:
    raw: dict
    base_dir: Path

    @property
    def seed(self) -> int:
        return self.raw.get("seed", 0)

    @property
    def metrics(self) -> list[str]:
        return list(self.raw.get("metrics", METRIC_NAMES))

    @property
    def alpha(self) -> float:
        return self.raw.get("alpha", 0.05)

    @property
    def streams(self) -> list[dict]:
        return self.raw["streams"]

    @property
    def methods(self) -> list[dict]:
        return self.raw["methods"]

    def hash(self) -> str:
        canonical = json.dumps(self.raw, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()


def _field_path(error) -> str:
    parts = [str(p) for p in error.absolute_path]
    return ".".join(parts) if parts else "<root>"


def validate_config(raw, base_dir=".", seed=None) -> ExperimentConfig:
    """Check a config dict and resolve derived values (seeds, paths)."""
    validator = jsonschema.Draft7Validator(CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(raw), key=lambda e: [str(p) for p in e.absolute_path])
    if errors:
        lines = [f"{_field_path(e)}: {e.message}" for e in errors]
        raise ConfigError("invalid config:\n  " + "\n  ".join(lines))
    raw = copy.deepcopy(raw)
    if seed is not None:
        raw["seed"] = seed
    for kind in ("streams", "methods"):
        ids = [entry["id"] for entry in raw[kind]]
        dupes = sorted({i for i in ids if ids.count(i) > 1})
        if dupes:
            raise ConfigError(f"{kind}: duplicate ids {dupes}")
    for i, entry in enumerate(raw["streams"]):
        if entry["type"] == "synthetic":
            entry.setdefault("seed", derive_seed(raw.get("seed", 0), i))
            try:
                _stream_config(entry)
            except InvalidInputError as exc:
                raise ConfigError(f"streams.{i}: {exc}") from None
    return ExperimentConfig(raw, Path(base_dir))


def load_config(path, seed=None) -> ExperimentConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})") from None
    return validate_config(raw, path.parent, seed=seed)


def derive_seed(global_seed, index) -> int:
    return int(np.random.SeedSequence([global_seed, index]).generate_state(1)[0])


def _stream_config(entry) -> StreamConfig:
    fields = {k: v for k, v in entry.items() if k not in ("id", "type")}
    return StreamConfig(**fields)


def _resolve(base_dir, path):
    p = Path(path)
    return p if p.is_absolute() else Path(base_dir) / p


def stream_info(entry, base_dir) -> dict:
    info = {"id": entry["id"], "type": entry["type"]}
    if entry["type"] == "synthetic":
        cfg = _stream_config(entry)
        info.update(seed=cfg.seed, n_chunks=cfg.n_chunks, drift_positions=cfg.drift_positions(),
                    config=cfg.to_dict())
    else:
        info["path"] = entry["path"]
        info["drift_positions"] = []
    return info


@lru_cache(maxsize=8)
def _load_chunks(entry_json, base_dir):
    entry = json.loads(entry_json)
    if entry["type"] == "synthetic":
        return generate_stream(_stream_config(entry)).chunks
    path = _resolve(base_dir, entry["path"])
    if entry["type"] == "chunked":
        return read_stream(path)
    spec = DatasetSpec(
        str(path),
        format=entry.get("format", "arff"),
        label_column=entry.get("label_column", -1),
        group=frozenset(str(g) for g in entry["group"]),
        chunk_size=entry.get("chunk_size", 2000),
        classes=frozenset(str(c) for c in entry["classes"]) if "classes" in entry else None,
        expected_ratio=entry.get("expected_ratio"),
        name=entry["id"],
    )
    return load_dataset(spec).chunks


def load_stream(entry, base_dir="."):
    return _load_chunks(json.dumps(entry, sort_keys=True), str(base_dir))


def build_method(entry):
    """Instantiate an untrained ensemble from a method entry."""
    base = entry["base"]
    params = {}
    if base == "KNN" and "k" in entry:
        params["k"] = entry["k"]
    if base in ("CART", "HDDT"):
        for key in ("max_depth", "min_samples_split"):
            if key in entry:
                params[key] = entry[key]
    return make_ensemble(
        entry["ensemble"],
        make_classifier(base, **params),
        ensemble_size=entry.get("ensemble_size", 10),
        n_folds=entry.get("folds", 5),
    )


def plan_runs(config: ExperimentConfig) -> list[dict]:
    return [{"stream": s["id"], "method": m["id"]} for s in config.streams for m in config.methods]


def _execute(stream_entry, method_entry, metrics, base_dir):
    try:
        chunks = load_stream(stream_entry, base_dir)
        tensor = test_then_train(chunks, {method_entry["id"]: build_method(method_entry)}, metrics)
    except Exception as exc:  # one failed run must not sink the grid
        log.exception("run %s x %s failed", stream_entry["id"], method_entry["id"])
        return None, f"{type(exc).__name__}: {exc}", None
    rows = [
        (stream_entry["id"], method_entry["id"], t + 1, metric, float(tensor.scores[0, t, j]))
        for t in range(tensor.n_chunks)
        for j, metric in enumerate(metrics)
    ]
    return rows, None, tensor.seconds[0].tolist()


def _versions() -> dict:
    return {
        "driftlab": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "python": platform.python_version(),
    }


def _format_value(v) -> str:
    return format(v, ".17g")


def write_results(rows, path) -> None:
    rows = sorted(rows, key=lambda r: (r[0], r[1], r[2], r[3]))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RESULTS_HEADER)
    for s, m, t, metric, v in rows:
        writer.writerow((s, m, t, metric, _format_value(v)))
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


def read_results(path):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if tuple(header or ()) != RESULTS_HEADER:
            raise InvalidInputError(f"{path}: unexpected header {header}")
        return [(s, m, int(t), metric, float(v)) for s, m, t, metric, v in reader]


def _write_json(path, payload) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def generate_streams(config: ExperimentConfig, out_dir) -> list[Path]:
    """Materialize every synthetic stream as a chunked CSV under ``out_dir/streams``."""
    target = Path(out_dir) / "streams"
    target.mkdir(parents=True, exist_ok=True)
    written = []
    for entry in config.streams:
        if entry["type"] != "synthetic":
            continue
        path = target / f"{entry['id']}.csv"
        write_stream(generate_stream(_stream_config(entry)).chunks, path)
        written.append(path)
    return written


def run_experiment(config: ExperimentConfig, out_dir, jobs=1, timings=False) -> dict:
    """Execute the full grid and write ``results.csv`` and ``manifest.json``.

    Output bytes depend only on the config and input files, not on ``jobs``.
    Returns the manifest.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    tasks = [(s, m, config.metrics, str(config.base_dir)) for s in config.streams for m in config.methods]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_execute, *zip(*tasks)))
    else:
        outcomes = [_execute(*task) for task in tasks]

    rows, runs, timing_rows = [], [], []
    for (s, m, _, _), (run_rows, error, seconds) in zip(tasks, outcomes):
        record = {"stream": s["id"], "method": m["id"]}
        if error is None:
            rows.extend(run_rows)
            record.update(status="ok", chunks_scored=len(run_rows) // len(config.metrics))
            timing_rows.extend((s["id"], m["id"], t, sec) for t, sec in enumerate(seconds))
        else:
            record.update(status="failed", error=error)
        runs.append(record)
    write_results(rows, out / RESULTS_FILE)
    manifest = {
        "format": "driftlab-manifest/v1",
        "config_hash": config.hash(),
        "seed": config.seed,
        "metrics": config.metrics,
        "alpha": config.alpha,
        "versions": _versions(),
        "streams": [stream_info(s, config.base_dir) for s in config.streams],
        "methods": config.methods,
        "runs": sorted(runs, key=lambda r: (r["stream"], r["method"])),
    }
    _write_json(out / MANIFEST_FILE, manifest)
    if timings:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(("stream_id", "method_id", "chunk_index", "seconds"))
        writer.writerows(sorted(timing_rows))
        (out / "timings.csv").write_text(buf.getvalue(), encoding="utf-8")
    return manifest


def plan_manifest(config: ExperimentConfig) -> dict:
    """Manifest of the grid without executing anything (every run ``planned``)."""
    return {
        "format": "driftlab-manifest/v1",
        "config_hash": config.hash(),
        "seed": config.seed,
        "metrics": config.metrics,
        "alpha": config.alpha,
        "versions": _versions(),
        "streams": [stream_info(s, config.base_dir) for s in config.streams],
        "methods": config.methods,
        "runs": [dict(r, status="planned") for r in plan_runs(config)],
    }


def score_matrix(rows, metric, streams=None, methods=None):
    """Per-stream mean of ``metric``: returns ``(streams, methods, matrix)``.

    Raises if any (stream, method) pair has no scores.
    """
    sums, counts = {}, {}
    for s, m, _, name, v in rows:
        if name == metric:
            sums[s, m] = sums.get((s, m), 0.0) + v
            counts[s, m] = counts.get((s, m), 0) + 1
    if not counts:
        raise InvalidInputError(f"no results for metric {metric!r}")
    streams = streams or sorted({s for s, _ in counts})
    methods = methods or sorted({m for _, m in counts})
    missing = [f"{s} x {m}" for s in streams for m in methods if (s, m) not in counts]
    if missing:
        raise InvalidInputError(f"metric {metric!r} has no results for: " + ", ".join(missing))
    mat = np.array([[sums[s, m] / counts[s, m] for m in methods] for s in streams])
    return streams, methods, mat


def analyze_results(results_dir, metrics=None, alpha=None) -> dict:
    """Rank analysis per metric; writes ``analysis/summary_<metric>.json``,
    ``analysis/cd_<metric>.json`` and a text report."""
    results_dir = Path(results_dir)
    manifest = json.loads((results_dir / MANIFEST_FILE).read_text(encoding="utf-8"))
    rows = read_results(results_dir / RESULTS_FILE)
    alpha = alpha if alpha is not None else manifest.get("alpha", 0.05)
    methods = [m["id"] for m in manifest["methods"]]
    streams = [s["id"] for s in manifest["streams"]]
    if len(methods) < 2:
        raise InvalidInputError("analysis needs results for at least two methods")
    metrics = metrics or manifest["metrics"]
    target = results_dir / "analysis"
    target.mkdir(exist_ok=True)
    summaries = {}
    report = []
    for metric in metrics:
        _, _, mat = score_matrix(rows, metric, streams, methods)
        if mat.shape[0] < 2:
            raise InvalidInputError("analysis needs results on at least two streams")
        summary = rank_summary(mat, methods, alpha)
        payload = summary.to_dict()
        payload["metric"] = metric
        payload["mean_scores"] = {m: float(v) for m, v in zip(methods, mat.mean(axis=0))}
        _write_json(target / f"summary_{metric}.json", payload)
        geometry = cd_diagram_geometry(summary)
        geometry["metric"] = metric
        _write_json(target / f"cd_{metric}.json", geometry)
        summaries[metric] = summary
        report.append(format_summary(metric, summary))
    (target / "report.txt").write_text("\n".join(report), encoding="utf-8")
    return summaries


def format_summary(metric, summary) -> str:
    fr = summary.friedman
    lines = [
        f"== {metric} (N={summary.n_streams} streams, k={summary.k} methods) ==",
        f"Friedman chi2 = {fr.statistic:.4f} (critical {fr.critical_value:.4f}, "
        f"p = {fr.p_value:.4g}) -> {'reject H0' if fr.reject else 'keep H0'}",
        f"Nemenyi CD (alpha={summary.alpha}) = {summary.cd:.4f}",
        f"{'method':<24}{'avg rank':>10}",
    ]
    for name, r in sorted(zip(summary.methods, summary.avg_ranks), key=lambda kv: -kv[1]):
        lines.append(f"{name:<24}{r:>10.3f}")
    lines.append("not significantly different: " +
                 "; ".join("{" + ", ".join(g) + "}" for g in summary.groups))
    return "\n".join(lines) + "\n"


def benchmark_grid(seeds=(1111, 1234, 1567), ratios=MINORITY_RATIOS) -> dict:
    """The full synthetic benchmark: 84 streams, 7 methods.

    Methods: HDWE over the four native bases plus AWE and SEA baselines.
    """
    streams = []
    for drift in ("sudden", "incremental"):
        for mode in ("static", "dynamic"):
            for ratio in ratios:
                for seed in seeds:
                    streams.append({
                        "id": f"{drift}-{mode}-{int(round(ratio * 100)):02d}-{seed}",
                        "type": "synthetic",
                        "drift_kind": drift,
                        "imbalance_mode": mode,
                        "minority_ratio": ratio,
                        "seed": seed,
                    })
    methods = [{"id": f"HDWE-{b}", "ensemble": "HDWE", "base": b} for b in BASE_CLASSIFIERS]
    methods += [
        {"id": "AWE-HDDT", "ensemble": "AWE", "base": "HDDT"},
        {"id": "SEA-HDDT", "ensemble": "SEA", "base": "HDDT"},
        {"id": "AWE-GNB", "ensemble": "AWE", "base": "GNB"},
    ]
    return {
        "seed": 0,
        "metrics": ["bac", "f1", "gmean", "precision", "recall", "specificity"],
        "streams": streams,
        "methods": methods,
    }


def default_jobs() -> int:
    return os.cpu_count() or 1
