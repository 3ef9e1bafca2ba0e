#!/usr/bin/env python3
"""
Experiment runner: one experiment per invocation, CSV series plus a JSON summary.

Usage:
    python scripts/run_experiment.py packet --config configs/experiments/packet.json --out reports/experiments --seed 7

Exit codes: 0 success, 1 configuration error, 2 numerical failure or failed kp-check.
"""
import sys
import os
import argparse
import traceback

from dotenv import load_dotenv

project_root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, project_root)

from src.core.errors import ConfigError, NumericalError
from src.core.experiment_config import EXPERIMENTS, ExperimentConfig
from src.core.experiments import run_experiment
from src.utils.logger import WorkbenchLogger
from src.utils.reporting import ReportUtils

# Load environment variables
load_dotenv()

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2


def build_parser():
    parser = argparse.ArgumentParser(
        description="Run a lattice workbench experiment (spectrum, gaps, simulate, packet, scaling, kp-check)"
    )
    parser.add_argument("experiment", choices=EXPERIMENTS, help="Experiment to run")
    parser.add_argument(
        "--config",
        help="JSON or YAML file with experiment parameters (defaults are used for missing keys)",
    )
    parser.add_argument("--out", help="Output directory for the CSV and summary JSON")
    parser.add_argument("--seed", type=int, help="Seed overriding the config value")
    parser.add_argument("--quiet", action="store_true", help="Do not print the summary table")
    return parser


def load_experiment_config(args):
    if args.config:
        return ExperimentConfig.from_file(args.experiment, args.config, seed=args.seed, output_dir=args.out)
    return ExperimentConfig.build(args.experiment, seed=args.seed, output_dir=args.out)


def main(argv=None):
    """Parse arguments, run the experiment and return the process exit code"""
    logger = WorkbenchLogger("ExperimentRunner")
    args = build_parser().parse_args(argv)

    try:
        cfg = load_experiment_config(args)
    except ConfigError as e:
        logger.error(f"❌ {e}")
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG

    reporter = ReportUtils(report_dir=cfg.output_dir)
    try:
        result = run_experiment(cfg, reporter)
    except ConfigError as e:
        logger.error(f"❌ {e}")
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as e:
        logger.error(f"❌ Numerical failure in '{cfg.experiment}': {e}")
        logger.debug(traceback.format_exc())
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL

    if not args.quiet:
        reporter.print_summary(f"{cfg.experiment} summary", result.summary)

    if not result.passed:
        logger.error(f"❌ Experiment '{cfg.experiment}' reported failed checks")
        return EXIT_NUMERICAL

    logger.success(f"Experiment '{cfg.experiment}' finished: {result.summary['csv']}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
