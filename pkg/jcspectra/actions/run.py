#!/usr/bin/env python3
"""
run.py - Run one experiment from a TOML config

Loads the config, evaluates every grid point, prints one PASS/FAIL line per
check and writes <stem>.csv, <stem>.json and <stem>.dat to the output
directory named in the config (or --output).
"""

import argparse
import dataclasses
import sys
from pathlib import Path

from jcspectra.config import load_config
from jcspectra.errors import ConfigError, ExperimentError
from jcspectra.experiments import run_experiment, write_artifacts
from jcspectra.utils import (
    EXIT_FAIL,
    EXIT_PASS,
    EXIT_USAGE,
    colorize_text,
    configure_logging,
    handle_error,
    status_line,
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Run a jcspectra experiment from a config file")
    parser.add_argument("config", help="Path to the experiment TOML file")
    parser.add_argument("--workers", type=int, help="Override [experiment] workers")
    parser.add_argument("--output", help="Override the output directory")
    parser.add_argument("-v", "--verbose", action="store_true", help="Log progress to stderr")
    return parser


def main(args: list[str] | None = None) -> None:
    """Entry point for the run action."""
    parsed_args = build_parser().parse_args(args)
    configure_logging(parsed_args.verbose)

    try:
        cfg = load_config(Path(parsed_args.config))
        if parsed_args.workers is not None:
            cfg = dataclasses.replace(cfg, workers=parsed_args.workers)
        if parsed_args.output is not None:
            cfg = dataclasses.replace(cfg, output_dir=Path(parsed_args.output))
    except (ConfigError, OSError) as e:
        handle_error("Error: cannot load config", e, EXIT_USAGE)

    print(colorize_text(f"Running {cfg.kind} ({cfg.stem})...", "blue"))
    try:
        result = run_experiment(cfg)
    except ExperimentError as e:
        handle_error("Error", e, EXIT_FAIL)

    try:
        paths = write_artifacts(cfg, result)
    except OSError as e:
        handle_error("Error: cannot write results", e, EXIT_FAIL)

    for check in result.checks:
        print(status_line(check.name, check.passed, check.detail))
    if result.degenerate:
        print(colorize_text("Degenerate: some rates are undefined (all values zero)", "yellow"))
    for path in paths:
        print(f"Wrote {path}")

    if result.exit_code != EXIT_PASS:
        sys.exit(result.exit_code)


if __name__ == "__main__":
    main()
