#!/usr/bin/env python3
"""
validate.py - Run the exact-identity suite

Every identity has a closed-form answer; the action exits 1 if any of them
misses its tolerance.
"""

import argparse
import sys
from pathlib import Path

from jcspectra.config import ExperimentConfig, ExperimentKind
from jcspectra.experiments import run_experiment, write_artifacts
from jcspectra.sequences import ModelParams
from jcspectra.utils import EXIT_FAIL, configure_logging, handle_error, status_line


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Run the jcspectra identity checks")
    parser.add_argument("--output", help="Also write validate.csv/json/dat to this directory")
    parser.add_argument("-v", "--verbose", action="store_true", help="Log details to stderr")
    return parser


def main(args: list[str] | None = None) -> None:
    """Entry point for the validate action."""
    parsed_args = build_parser().parse_args(args)
    configure_logging(parsed_args.verbose)

    cfg = ExperimentConfig(
        model=ModelParams.jaynes_cummings(),
        kind=ExperimentKind.VALIDATE,
        output_dir=Path(parsed_args.output or "."),
        stem="validate",
    )
    result = run_experiment(cfg)

    for check in result.checks:
        print(status_line(check.name, check.passed, check.detail))
    failed = sum(not c.passed for c in result.checks)
    print(f"{len(result.checks) - failed}/{len(result.checks)} identities hold")

    if parsed_args.output:
        try:
            for path in write_artifacts(cfg, result):
                print(f"Wrote {path}")
        except OSError as e:
            handle_error("Error: cannot write results", e, EXIT_FAIL)

    if failed:
        sys.exit(EXIT_FAIL)


if __name__ == "__main__":
    main()
