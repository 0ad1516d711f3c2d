"""Command line entry point: ``elastogauge run --config cfg.json`` and ``elastogauge list``."""

from __future__ import annotations

import argparse
import json
import sys

from .runner import EXPERIMENTS, ConfigError, RunConfig, emit_report, resolve_output_dir, run_experiment

EXIT_OK, EXIT_ASSERTION, EXIT_CONFIG = 0, 1, 2


def _parser():
    parser = argparse.ArgumentParser(prog="elastogauge", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run one experiment from a JSON config")
    run.add_argument("--config", required=True)
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--out", default=None)
    sub.add_parser("list", help="list experiments and their parameter defaults")
    return parser


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    if args.command == "list":
        for name, exp in sorted(EXPERIMENTS.items()):
            print(f"{name}: {exp.description}")
            print(f"  grid: {json.dumps(exp.grid_defaults)}")
            print(f"  params: {json.dumps(exp.defaults)}")
        return EXIT_OK

    try:
        with open(args.config, encoding="utf-8") as fh:
            raw = json.load(fh)
        if args.seed is not None:
            if args.seed < 0:
                raise ConfigError("seed", "must be an unsigned integer")
            raw["seed"] = args.seed
        config = RunConfig.from_dict(raw)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, json.JSONDecodeError) as exc:
        print(f"configuration error: {args.config}: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    report = run_experiment(config)
    out = resolve_output_dir(config, args.out)
    emit_report(report, out)
    for name, ok in report.assertions.items():
        print(f"{'PASS' if ok else 'FAIL'} {name}")
    print(f"{config.experiment}: wrote {len(report.files)} files to {out} in {report.wall_time:.2f} s")
    return EXIT_OK if report.passed else EXIT_ASSERTION


if __name__ == "__main__":
    sys.exit(main())
