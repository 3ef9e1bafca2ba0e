# src/utils/logger.py

import logging
import os
import re
import threading
from datetime import datetime
from logging.handlers import RotatingFileHandler
from pathlib import Path

from src.utils.cleanup import CleanupManager

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)-8s - [%(filename)s:%(lineno)d] - %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"


class CaptureHandler(logging.Handler):
    """Buffers formatted records under the active context key (a test node id or an experiment name)"""

    def __init__(self):
        super().__init__()
        self.buffers = {}
        self.active = None

    def open(self, key):
        self.active = key
        self.buffers[key] = []

    def emit(self, record):
        if self.active is not None:
            self.buffers[self.active].append(self.format(record))

    def release(self, key=None):
        if key is None:
            # logging.Handler.release() (lock release) is called with no arguments
            return super().release()
        if self.active == key:
            self.active = None
        return self.buffers.pop(key, [])


def _safe_filename(key):
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", key).strip("_") or "context"


class WorkbenchLogger:
    """
    Process-wide logger for the lattice workbench.

    The first construction configures a console handler, a rotating file under
    logs/ and the capture handler; later constructions return the same
    instance, so ``WorkbenchLogger(self.__class__.__name__)`` is cheap.
    """

    LOG_RETENTION_DAYS = 30
    CLEANUP_EVERY_DAYS = 7
    MAX_LOG_BYTES = 10 * 1024 * 1024
    BACKUP_COUNT = 5
    LOGS_DIR = Path(__file__).resolve().parents[2] / "logs"

    _instance = None
    _initialized = False
    _lock = threading.Lock()

    def __new__(cls, *args, **kwargs):
        with cls._lock:
            if cls._instance is None:
                cls._instance = super().__new__(cls)
        return cls._instance

    def __init__(self, name=None, log_level=None, log_to_file=True):
        with self._lock:
            if WorkbenchLogger._initialized:
                return
            self.name = name or "TodaWorkbench"
            self.log_level = log_level or getattr(logging, os.getenv("LOG_LEVEL", "INFO").upper(), logging.INFO)
            self.log_file = None
            self.capture = CaptureHandler()
            self.logger = self._configure(log_to_file)
            WorkbenchLogger._initialized = True
        self._prune_old_logs()

    def _configure(self, log_to_file):
        logger = logging.getLogger(self.name)
        logger.setLevel(self.log_level)
        logger.handlers = []
        formatter = logging.Formatter(LOG_FORMAT, datefmt=DATE_FORMAT)

        console = logging.StreamHandler()
        console.setFormatter(formatter)
        logger.addHandler(console)

        if log_to_file:
            try:
                self.LOGS_DIR.mkdir(parents=True, exist_ok=True)
                self.log_file = self.LOGS_DIR / f"toda_workbench_{datetime.now():%Y%m%d_%H%M%S}.log"
                file_handler = RotatingFileHandler(
                    self.log_file,
                    maxBytes=self.MAX_LOG_BYTES,
                    backupCount=self.BACKUP_COUNT,
                    encoding="utf-8",
                    delay=True,
                )
                file_handler.setFormatter(formatter)
                logger.addHandler(file_handler)
            except OSError as e:
                self.log_file = None
                print(f"{datetime.now():%Y-%m-%d %H:%M:%S} - LoggerSetup - WARNING - file logging disabled: {e}")

        self.capture.setFormatter(formatter)
        logger.addHandler(self.capture)
        logger.propagate = False
        return logger

    def _prune_old_logs(self):
        """Delete logs past retention at most once every CLEANUP_EVERY_DAYS, tracked by logs/.last_cleanup"""
        marker = self.LOGS_DIR / ".last_cleanup"
        if marker.exists():
            age_days = (datetime.now() - datetime.fromtimestamp(marker.stat().st_mtime)).days
            if age_days < self.CLEANUP_EVERY_DAYS:
                return
        try:
            stats = CleanupManager(self.LOG_RETENTION_DAYS, logger=self).cleanup_old_files(self.LOGS_DIR, ["*.log"])
            if stats.deleted:
                self.info(f"Log retention removed {stats.deleted} files")
            marker.touch()
        except OSError as e:
            self.warning(f"Log retention skipped: {e}")

    def begin_capture(self, key):
        """Start buffering records for one test or experiment run"""
        self.capture.open(key)

    def end_capture(self, key, status=None, duration=None, output_dir="reports/logs"):
        """
        Close the buffer for key and write it to output_dir.

        Returns:
            Path of the written log, or None when nothing was captured
        """
        if status:
            icon = {"PASSED": "✅", "FAILED": "❌"}.get(status.upper(), "🔚")
            timing = f" in {duration:.2f}s" if duration else ""
            self.info(f"{icon} {status.upper()}: {key}{timing}")
        lines = self.capture.release(key)
        if not lines:
            return None
        directory = Path(output_dir)
        directory.mkdir(parents=True, exist_ok=True)
        path = directory / f"{_safe_filename(key)}_{datetime.now():%H%M%S}.log"
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return path

    def info(self, message, *args, **kwargs):
        self.logger.info(message, *args, stacklevel=2, **kwargs)

    def debug(self, message, *args, **kwargs):
        self.logger.debug(message, *args, stacklevel=2, **kwargs)

    def warning(self, message, *args, **kwargs):
        self.logger.warning(message, *args, stacklevel=2, **kwargs)

    def error(self, message, *args, **kwargs):
        self.logger.error(message, *args, stacklevel=2, **kwargs)

    def success(self, message):
        self.logger.info(f"SUCCESS: {message}", stacklevel=2)

    def numeric_check(self, check_name, value, tolerance):
        """Log |value| against tolerance; failures go out at WARNING. Returns whether it passed."""
        passed = abs(value) <= tolerance
        level = logging.INFO if passed else logging.WARNING
        icon = "✅" if passed else "❌"
        self.logger.log(level, f"{icon} CHECK - {check_name}: {value:.3e} (tol {tolerance:.1e})", stacklevel=2)
        return passed

    def performance_metric(self, metric_name, value, unit="s"):
        self.logger.info(f"📊 PERFORMANCE - {metric_name}: {value} {unit}", stacklevel=2)
