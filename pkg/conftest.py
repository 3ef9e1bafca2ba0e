# conftest.py

import os
import time
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from configs.environment import EnvironmentConfig
from src.utils.logger import WorkbenchLogger

logger = WorkbenchLogger("conftest")

# Test type classification by directory
SUITE_MARKERS = {
    "lattice_tests": "lattice",
    "fourier_tests": "fourier",
    "spectral_tests": "spectral",
    "dynamics_tests": "dynamics",
    "majorant_tests": "majorant",
    "experiment_tests": "experiments",
}

# Property tests run the numerics many times; keep the default profile small
settings.register_profile(
    "workbench",
    max_examples=25,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("ci", max_examples=100, deadline=None, derandomize=True)
settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "workbench"))


def pytest_addoption(parser):
    """Add command line options for slow trajectories"""
    parser.addoption(
        "--run-slow",
        action="store_true",
        default=False,
        help="Run tests marked slow (long FPU and Toda trajectories)"
    )


def pytest_configure(config):
    """Initialize pytest configuration"""
    config._run_slow = config.getoption("--run-slow")
    Path("reports/logs").mkdir(parents=True, exist_ok=True)
    if not config._run_slow:
        logger.info("⚠️ Slow tests will be skipped (use --run-slow to include them)")


def pytest_collection_modifyitems(config, items):
    """Attach suite markers from the directory name and skip slow tests unless requested"""
    skip_slow = pytest.mark.skip(reason="slow test: pass --run-slow to include")
    counts = {}

    for item in items:
        test_path = str(item.fspath)
        for directory, marker in SUITE_MARKERS.items():
            if directory in test_path:
                item.add_marker(getattr(pytest.mark, marker))
                counts[marker] = counts.get(marker, 0) + 1
        if "slow" in item.keywords and not config._run_slow:
            item.add_marker(skip_slow)

    logger.info(f"🔍 Collected {len(items)} tests: {counts}")


def pytest_runtest_setup(item):
    logger.begin_capture(item.nodeid)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    """Save test-specific logs once the call phase finishes"""
    outcome = yield
    report = outcome.get_result()

    if report.when == "setup":
        item.start_time = time.time()
        return
    if report.when != "call":
        return

    duration = time.time() - getattr(item, "start_time", time.time())
    status = "PASSED" if report.passed else "SKIPPED" if report.skipped else "FAILED"
    if status == "FAILED" and call.excinfo is not None:
        logger.error(f"❌ {item.nodeid}: {call.excinfo.type.__name__}: {call.excinfo.value}")

    try:
        item._test_log = logger.end_capture(item.nodeid, status, duration, "reports/logs")
    except OSError as e:
        logger.error(f"Failed to save the log of {item.nodeid}: {e}")


# ========== HELPER FIXTURES ==========

@pytest.fixture
def rng():
    """Seeded generator; every test sees the same stream"""
    return np.random.default_rng(EnvironmentConfig.DEFAULT_SEED)


@pytest.fixture
def workdir(tmp_path):
    """Output directory for experiment artifacts"""
    out = tmp_path / "experiments"
    out.mkdir()
    return out
