"""Command-line entry point: ``rfcbf select|compare|bench --config FILE``."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .config import ConfigError, load_config, with_overrides
from .harness import render_bench, render_tables, run_bench, run_compare, run_select


def _floats(text):
    return [float(v) for v in text.split(",") if v.strip()]


def _ints(text):
    return [int(v) for v in text.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rfcbf", description="FCBF / RFCBF feature selection experiments")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("select", "run each configured selector once on the full dataset"),
        ("compare", "repeated stratified cross-validation with KNN"),
        ("bench", "time feature selection alone"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="INI experiment file")
        p.add_argument("--delta", type=_floats, help="comma-separated relevance thresholds")
        p.add_argument("--times", type=_ints, help="comma-separated sampling counts T")
        p.add_argument("--prob", type=_floats, help="comma-separated sampling probabilities G")
        p.add_argument("--bins", type=_ints, help="comma-separated discretizer bin counts")
        p.add_argument("--seed", type=int)
        p.add_argument("--folds", type=int)
        p.add_argument("--repeats", type=int)
        p.add_argument("--workers", type=int)
        p.add_argument("--out", help="output directory")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = with_overrides(load_config(args.config), delta=args.delta, times=args.times,
                                prob=args.prob, bins=args.bins, seed=args.seed, folds=args.folds,
                                repeats=args.repeats, workers=args.workers, out=args.out)
    except (OSError, ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for problem in config.check_paths():
        print(f"warning: {problem}", file=sys.stderr)

    out = config.out
    out.mkdir(parents=True, exist_ok=True)
    if args.command == "compare":
        report = run_compare(config)
        (out / "report.json").write_text(report.to_json())
        timing = {f"{c.sweep}/{c.dataset}/{c.method}/{json.dumps(c.params, sort_keys=True)}":
                  c.mean_selection_seconds for c in report.cells}
        (out / "timing.json").write_text(json.dumps(timing, sort_keys=True, indent=2) + "\n")
        tables = render_tables(report)
        failed = bool(report.failed)
    elif args.command == "select":
        result = run_select(config)
        (out / "select.json").write_text(json.dumps(result, sort_keys=True, indent=2) + "\n")
        lines = []
        for s in result["selections"]:
            if s["status"] == "ok":
                lines.append(f"{s['dataset']} {s['method']} delta={s['params']['delta']:g}: "
                             f"{len(s['selected'])} features {s['feature_names']}")
            else:
                lines.append(f"{s['dataset']} {s['method']}: FAILED {s['error']}")
        tables = "\n".join(lines) + "\n"
        failed = result["failed"]
    else:
        result = run_bench(config)
        (out / "bench.json").write_text(json.dumps(result, sort_keys=True, indent=2) + "\n")
        tables = render_bench(result)
        failed = result["failed"]
    (out / "tables.txt").write_text(tables)
    sys.stdout.write(tables)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
