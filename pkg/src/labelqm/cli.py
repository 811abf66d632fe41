"""Command line entry point: ``labelqm run | validate | list-experiments``."""
from __future__ import annotations

import argparse
import sys

from .config import DESCRIPTIONS, EXPERIMENTS, load_config
from .errors import ConfigError, ExperimentError
from .runner import emit_report, format_summary, run_experiment

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3


def _load(path):
    try:
        return load_config(path)
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e.strerror or e}") from e


def cmd_run(args) -> int:
    cfg = _load(args.config)
    out = args.out or cfg.data["output"]["directory"]
    fmt = args.format or cfg.data["output"]["formats"]
    result = run_experiment(cfg)
    try:
        paths = emit_report(result, out, fmt)
    except OSError as e:
        raise ExperimentError(cfg.experiment, e) from e
    print(format_summary(result))
    for p in paths:
        print(f"wrote {p}")
    return EXIT_OK


def cmd_validate(args) -> int:
    cfg = _load(args.config)
    print(f"ok: {cfg.experiment} (config sha256 {cfg.sha256()})")
    if args.canonical:
        sys.stdout.write(cfg.canonical_text())
    return EXIT_OK


def cmd_list(_args) -> int:
    w = max(map(len, EXPERIMENTS))
    for name in EXPERIMENTS:
        print(f"{name.ljust(w)}  {DESCRIPTIONS[name]}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="labelqm", description="Label-theory vs. orthodox measurement experiments")
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run an experiment config and write artifacts")
    r.add_argument("--config", required=True)
    r.add_argument("--out", help="output directory (default: output.directory of the config)")
    r.add_argument("--format", choices=("csv", "json", "both"), help="default: output.formats of the config")
    r.set_defaults(func=cmd_run)
    v = sub.add_parser("validate", help="check a config without running it")
    v.add_argument("--config", required=True)
    v.add_argument("--canonical", action="store_true", help="also print the canonical config text")
    v.set_defaults(func=cmd_validate)
    ls = sub.add_parser("list-experiments", help="list the experiment types")
    ls.set_defaults(func=cmd_list)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except ExperimentError as e:
        print(f"runtime error: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
