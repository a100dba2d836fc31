#!/usr/bin/env python3
"""
Command-line entry point: run scenario configs, builtin scenarios, sweeps,
stationary curves and semiclassical tables. Exit codes: 0 success,
2 invalid input, 3 numerical failure.
"""

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

from core import reporter
from core.errors import SimulationError
from core.models import ScenarioConfig
from core.orchestrator import ENERGY_SCAN_PATH, ScenarioOrchestrator
from core.parser import ScenarioParser
from core.scenarios import get_builtin, list_scenarios
from core.stationary import BRANCH_TRANSMISSION
from utils.helpers import create_safe_filename, safe_log, set_log_level


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out-dir", default=None, help="Output directory (default: the config's outputs.directory)")
    common.add_argument("--threads", type=int, default=None, help="Worker threads for cases and sweeps")
    common.add_argument("--seed", type=int, default=None, help="Reserved; the simulation has no random components")
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", action="store_true", help="Debug logging")
    verbosity.add_argument("--quiet", action="store_true", help="Warnings and errors only")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(description="Wave packets meeting moving and accelerated potential structures")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", parents=[common], help="Run a scenario config")
    run.add_argument("config", help="YAML scenario file")

    sweep = commands.add_parser("sweep", parents=[common], help="Sweep one config parameter")
    sweep.add_argument("config", help="YAML scenario file")
    sweep.add_argument("--vary", required=True, help="Dotted parameter path, e.g. motion.a_m_s2")
    sweep.add_argument("--values", type=float, nargs="*", default=[], help="Values to run")

    for name, text in (("transmission", "Transmission / reflection curve of the structure at rest"),
                       ("gdt", "Group delay curve for the configured branch"),
                       ("semiclassical", "Semiclassical velocity changes")):
        command = commands.add_parser(name, parents=[common], help=text)
        command.add_argument("config", help="YAML scenario file")

    commands.add_parser("list-scenarios", parents=[common], help="List builtin scenarios")

    scenario = commands.add_parser("scenario", parents=[common], help="Run a builtin scenario")
    scenario.add_argument("name", help="Builtin scenario name (see list-scenarios)")
    return parser


def _output_dir(args: argparse.Namespace, config: ScenarioConfig) -> Path:
    directory = Path(args.out_dir or config.outputs.directory) / create_safe_filename(config.name)
    directory.mkdir(parents=True, exist_ok=True)
    return directory


def _run(config: ScenarioConfig, args: argparse.Namespace, orchestrator: ScenarioOrchestrator) -> int:
    result = orchestrator.run_scenario(config, out_dir=args.out_dir, threads=args.threads)
    for path in result.artifacts:
        print(path)
    if result.error:
        print(f"error: {result.error}", file=sys.stderr)
    return result.exit_code


def _sweep(config: ScenarioConfig, args: argparse.Namespace, orchestrator: ScenarioOrchestrator) -> int:
    rows = orchestrator.sweep(config, vary=args.vary, values=args.values, threads=args.threads)
    path = reporter.write_sweep_csv(_output_dir(args, config) / "sweep.csv", args.vary, rows,
                                    energy_scan=args.vary == ENERGY_SCAN_PATH)
    print(path)
    return 0


def _curve(config: ScenarioConfig, args: argparse.Namespace, orchestrator: ScenarioOrchestrator) -> int:
    branch = BRANCH_TRANSMISSION if args.command == "transmission" else None
    curve = orchestrator.run_stationary(config, branch=branch)
    directory = _output_dir(args, config)
    print(reporter.write_curve_csv(directory / f"curve_{curve.branch}.csv", curve))
    print(reporter.write_json(directory / f"stationary_{curve.branch}.json",
                              orchestrator.stationary_summary(config, curve)))
    return 0


def _semiclassical(config: ScenarioConfig, args: argparse.Namespace, orchestrator: ScenarioOrchestrator) -> int:
    rows = orchestrator.run_semiclassical(config)
    print(reporter.write_semiclassical_csv(_output_dir(args, config) / "semiclassical.csv", rows))
    return 0


COMMANDS = {
    "run": _run,
    "scenario": _run,
    "sweep": _sweep,
    "transmission": _curve,
    "gdt": _curve,
    "semiclassical": _semiclassical,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.verbose:
        set_log_level("DEBUG")
    elif args.quiet:
        set_log_level("WARNING")
    if args.seed is not None:
        safe_log(f"CLI: seed {args.seed} recorded (no random components)", "DEBUG")

    try:
        if args.command == "list-scenarios":
            print(json.dumps(list_scenarios(), indent=2))
            return 0
        config = get_builtin(args.name) if args.command == "scenario" else ScenarioParser.load_file(args.config)
        return COMMANDS[args.command](config, args, ScenarioOrchestrator())
    except SimulationError as exc:
        safe_log(f"CLI: {exc.error_type}: {exc}", "ERROR")
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
