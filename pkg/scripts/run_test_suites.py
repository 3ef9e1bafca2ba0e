#!/usr/bin/env python3
"""
Test suite runner with CLI argument for suite selection and per-suite HTML/JSON reports
"""
import sys
import os
import argparse
import pytest
from dotenv import load_dotenv

project_root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, project_root)

from configs.environment import EnvironmentConfig
from src.utils.logger import WorkbenchLogger

# Load environment variables
load_dotenv()

# Map suite names to directories
TEST_SUITES = {
    "lattice": "src/tests/lattice_tests/",
    "fourier": "src/tests/fourier_tests/",
    "spectral": "src/tests/spectral_tests/",
    "dynamics": "src/tests/dynamics_tests/",
    "majorant": "src/tests/majorant_tests/",
    "experiments": "src/tests/experiment_tests/",
}


def _log_environment_metadata(logger):
    for key, value in EnvironmentConfig.get_environment_metadata().items():
        logger.info(f"{key}: {value}")


def run_tests(suite_name, pytest_args=None, run_slow=False):
    """Run one test suite and write reports/<suite>_test_report.{html,json}"""
    logger = WorkbenchLogger("TestRunner")

    if suite_name not in TEST_SUITES:
        logger.error(f"Invalid suite name: '{suite_name}'")
        print(f"Available options: {', '.join(TEST_SUITES)}")
        return 1

    test_path = TEST_SUITES[suite_name]
    os.makedirs("reports", exist_ok=True)
    logger.info(f"Running {suite_name.upper()} tests from {test_path}")

    base_pytest_args = [
        test_path,
        "-v",
        f"--html=reports/{suite_name}_test_report.html",
        "--self-contained-html",
        "--json-report",
        f"--json-report-file=reports/{suite_name}_test_report.json",
        "--log-cli-level=INFO",
        "--log-cli-format=%(asctime)s [%(levelname)s] %(message)s",
        "--log-cli-date-format=%Y-%m-%d %H:%M:%S",
    ]
    if run_slow:
        base_pytest_args.append("--run-slow")
    if pytest_args:
        base_pytest_args.extend(pytest_args)

    exit_code = pytest.main(base_pytest_args)
    if exit_code == 0:
        logger.success(f"All {suite_name} tests passed!")
    else:
        logger.error(f"{suite_name} suite finished with pytest exit code {int(exit_code)}")
    return int(exit_code)


def run_multiple_suites(suite_names, pytest_args=None, run_slow=False):
    """Run several suites sequentially; the first non-zero exit code wins"""
    logger = WorkbenchLogger("TestRunner")
    _log_environment_metadata(logger)
    overall_exit_code = 0

    for suite_name in suite_names:
        logger.info(f"🚀 Starting {suite_name.upper()} test suite...")
        exit_code = run_tests(suite_name, pytest_args, run_slow)
        if exit_code != 0 and overall_exit_code == 0:
            overall_exit_code = exit_code
        logger.info(f"✅ Completed {suite_name.upper()} test suite")

    return overall_exit_code


if __name__ == "__main__":
    parser = argparse.ArgumentParser(
        description=f"Run test suites dynamically ({', '.join(TEST_SUITES)})"
    )
    parser.add_argument(
        "--suite",
        nargs="+",
        default=list(TEST_SUITES),
        choices=list(TEST_SUITES),
        help="Specify test suite(s) to run (default: all)"
    )
    parser.add_argument(
        "--run-slow",
        action="store_true",
        help="Include tests marked slow (long trajectories)"
    )
    parser.add_argument(
        "--pytest-args",
        nargs="*",
        help="Additional arguments to pass to pytest (e.g., -k 'test_gap')"
    )
    args = parser.parse_args()

    sys.exit(run_multiple_suites(args.suite, args.pytest_args, args.run_slow))
