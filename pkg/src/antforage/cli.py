"""Command-line entry point: ``antforage run | validate | print-defaults``."""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from antforage.diagnostics import write_timeseries_csv
from antforage.output import SnapshotWriter, write_manifest
from antforage.scenario import ConfigError, bundled_config_text, load_config, validate
from antforage.stepper import run

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_RUNTIME = 2
EXIT_USAGE = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_help(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="antforage", description="Simulate ant foraging with pheromone trails.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("run", help="run a scenario and write time series, snapshots and manifest")
    p.add_argument("--config", required=True, help="scenario TOML file")
    p.add_argument("--out", help="output directory (default: run.out_dir of the config)")
    p.add_argument("--steps", type=int, help="override run.steps")
    p.add_argument("--dt", type=float, help="override run.dt")
    p.add_argument("--force", action="store_true", help="allow writing into a non-empty output directory")

    p = sub.add_parser("validate", help="check a scenario and print its violations")
    p.add_argument("--config", required=True, help="scenario TOML file")

    sub.add_parser("print-defaults", help="print the commented reference scenario")
    return parser


def _load(path: str):
    try:
        return load_config(path)
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror or exc}") from None


def cmd_validate(args) -> int:
    problems = validate(_load(args.config))
    for v in problems:
        print(v)
    if not problems:
        print("ok")
    return EXIT_OK if not problems else EXIT_INVALID


def cmd_run(args) -> int:
    scenario = _load(args.config)
    changes = {}
    if args.steps is not None:
        changes["steps"] = args.steps
    if args.dt is not None:
        changes["dt"] = args.dt
    if args.out is not None:
        changes["out_dir"] = args.out
    scenario = replace(scenario, run=replace(scenario.run, **changes))

    problems = validate(scenario)
    blocking = [v for v in problems if v.code != "run.dt_unstable"]
    for v in problems:
        print(("warning: " if v.code == "run.dt_unstable" else "") + str(v), file=sys.stderr)
    if blocking:
        return EXIT_INVALID

    out = Path(scenario.run.out_dir)
    if out.exists() and any(out.iterdir()) and not args.force:
        raise UsageError(f"output directory {out} is not empty (use --force to write into it)")
    out.mkdir(parents=True, exist_ok=True)

    snapshots = SnapshotWriter(scenario, out)
    report = run(scenario, observers=[snapshots])
    write_timeseries_csv(report.series, out / "timeseries.csv")
    write_manifest(report, scenario, out / "manifest.json", snapshots.entries)

    print(f"{report.termination}: {report.steps_done}/{report.steps_requested} steps, "
          f"t = {report.final_time:.6g}, wall {report.wall_time:.1f} s -> {out}")
    for k, ev in enumerate(report.events.sources):
        print(f"food[{k}] events: {ev.as_dict()}")
    if report.termination == "error":
        print(f"error: {report.error_code}: {report.error}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.error("a subcommand is required")
        if args.command == "print-defaults":
            sys.stdout.write(bundled_config_text("two_sources"))
            return EXIT_OK
        if args.command == "validate":
            return cmd_validate(args)
        return cmd_run(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
