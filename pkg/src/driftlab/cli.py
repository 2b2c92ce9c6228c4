"""Command line entry point: ``driftlab {gen,run,analyze,plot}``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .errors import InvalidInputError
from .experiment import (
    MANIFEST_FILE,
    ConfigError,
    analyze_results,
    default_jobs,
    format_summary,
    generate_streams,
    load_config,
    plan_manifest,
    run_experiment,
)
from .metrics import HD_METRIC, METRIC_NAMES
from .plotting import plot_results

log = logging.getLogger("driftlab")

EXIT_OK, EXIT_PARTIAL, EXIT_CONFIG = 0, 1, 2


def _out_dir(args, config=None):
    if args.out:
        return Path(args.out)
    if config is not None and "output" in config.raw:
        return config.base_dir / config.raw["output"]
    return Path("results")


def cmd_gen(args):
    config = load_config(args.config, seed=args.seed)
    for path in generate_streams(config, _out_dir(args, config)):
        print(path)
    return EXIT_OK


def cmd_run(args):
    config = load_config(args.config, seed=args.seed)
    out = _out_dir(args, config)
    if args.dry_run:
        out.mkdir(parents=True, exist_ok=True)
        manifest = plan_manifest(config)
        (out / MANIFEST_FILE).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
        print(f"planned {len(manifest['runs'])} runs -> {out / MANIFEST_FILE}")
        return EXIT_OK
    jobs = args.jobs or config.raw.get("jobs") or default_jobs()
    manifest = run_experiment(config, out, jobs=jobs, timings=args.timings)
    failed = [r for r in manifest["runs"] if r["status"] != "ok"]
    print(f"{len(manifest['runs']) - len(failed)}/{len(manifest['runs'])} runs ok -> {out}")
    for r in failed:
        print(f"FAILED {r['stream']} x {r['method']}: {r['error']}", file=sys.stderr)
    return EXIT_PARTIAL if failed else EXIT_OK


def cmd_analyze(args):
    out = _out_dir(args)
    metrics = [args.metric] if args.metric else None
    summaries = analyze_results(out, metrics=metrics, alpha=args.alpha)
    for metric, summary in summaries.items():
        print(format_summary(metric, summary))
    return EXIT_OK


def cmd_plot(args):
    written = plot_results(_out_dir(args))
    for path in written:
        print(path)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="driftlab", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config=True):
        if config:
            p.add_argument("--config", required=True, help="experiment config (JSON)")
            p.add_argument("--seed", type=int, help="override the config's global seed")
        p.add_argument("--out", help="output directory")

    p = sub.add_parser("gen", help="write synthetic streams as chunked CSV")
    common(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("run", help="run the stream x method grid")
    common(p)
    p.add_argument("--jobs", type=int, help="parallel runs (default: all cores)")
    p.add_argument("--dry-run", action="store_true", help="only write the planned manifest")
    p.add_argument("--timings", action="store_true", help="also write per-chunk wall-clock times")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("analyze", help="Friedman / Nemenyi analysis of a results directory")
    common(p, config=False)
    p.add_argument("--metric", choices=list(METRIC_NAMES) + [HD_METRIC])
    p.add_argument("--alpha", type=float, choices=[0.05, 0.10])
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("plot", help="render SVG charts for a results directory")
    common(p, config=False)
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (InvalidInputError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARTIAL


if __name__ == "__main__":
    sys.exit(main())
