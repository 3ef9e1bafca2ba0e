# src/utils/cleanup.py

import logging
import time
from dataclasses import dataclass, field
from pathlib import Path

SECONDS_PER_DAY = 24 * 60 * 60
SUMMARY_SUFFIX = "_summary.json"


@dataclass
class CleanupStats:
    target: str
    directory: str
    matched: list = field(default_factory=list)
    dry_run: bool = False

    @property
    def deleted(self):
        return 0 if self.dry_run else len(self.matched)


class CleanupManager:
    """
    Retention-based cleanup of workbench artifacts.

    Logs and pytest reports expire file by file. Experiment outputs expire as a
    run: ``<experiment>.csv`` goes together with ``<experiment>_summary.json``,
    and the pair is dated by its summary.
    """

    def __init__(self, retention_days=30, logger=None, base_dir=None):
        if retention_days < 0:
            raise ValueError(f"retention_days must be >= 0, got {retention_days}")
        self.retention_days = retention_days
        self.logger = logger or logging.getLogger("CleanupManager")
        self.base_dir = Path(base_dir) if base_dir else Path(__file__).resolve().parents[2]

        self.targets = {
            "logs": (self.base_dir / "logs", ("*.log",)),
            "test_logs": (self.base_dir / "reports" / "logs", ("*.log",)),
            "reports": (self.base_dir / "reports", ("*_test_report.json", "*_test_report.html", "report.html")),
            "experiments": (self.base_dir / "reports" / "experiments", None),
        }

    @property
    def cutoff(self):
        return time.time() - self.retention_days * SECONDS_PER_DAY

    def cleanup_all(self, dry_run=False, targets=None):
        """
        Clean every requested target.

        Args:
            dry_run: only report what would be deleted
            targets: subset of target names, default all

        Returns:
            dict mapping target name to CleanupStats
        """
        self.logger.info(f"🧹 Cleanup: retention {self.retention_days} days, dry run {dry_run}")
        stats = {}
        for name in targets or list(self.targets):
            if name not in self.targets:
                self.logger.warning(f"⚠️ Unknown cleanup target '{name}'")
                continue
            directory, patterns = self.targets[name]
            if patterns is None:
                stats[name] = self.cleanup_experiment_runs(directory, dry_run=dry_run)
            else:
                stats[name] = self.cleanup_old_files(directory, patterns, dry_run=dry_run)
            stats[name].target = name

        total = sum(len(s.matched) for s in stats.values())
        self.logger.info(f"Cleanup complete: {total} files {'matched' if dry_run else 'deleted'}")
        return stats

    def cleanup_old_files(self, directory, patterns, dry_run=False):
        """Delete files in directory matching any pattern and older than the retention period"""
        directory = Path(directory)
        stats = CleanupStats("files", str(directory), dry_run=dry_run)
        if not directory.is_dir():
            return stats

        cutoff = self.cutoff
        for pattern in patterns:
            for path in sorted(directory.glob(pattern)):
                if path.is_file() and path.stat().st_mtime < cutoff:
                    stats.matched.append(str(path))
        self._delete(stats)
        return stats

    def cleanup_experiment_runs(self, directory, dry_run=False):
        """
        Delete expired experiment runs under directory, searched recursively.

        A run is a summary JSON plus the CSV of the same experiment next to it;
        a CSV without a summary is dated by itself.
        """
        directory = Path(directory)
        stats = CleanupStats("experiments", str(directory), dry_run=dry_run)
        if not directory.is_dir():
            return stats

        cutoff = self.cutoff
        paired = set()
        for summary in sorted(directory.rglob(f"*{SUMMARY_SUFFIX}")):
            csv_path = summary.with_name(summary.name[: -len(SUMMARY_SUFFIX)] + ".csv")
            paired.add(csv_path)
            if summary.stat().st_mtime < cutoff:
                stats.matched.append(str(summary))
                if csv_path.is_file():
                    stats.matched.append(str(csv_path))

        for csv_path in sorted(directory.rglob("*.csv")):
            if csv_path not in paired and csv_path.stat().st_mtime < cutoff:
                stats.matched.append(str(csv_path))

        self._delete(stats)
        return stats

    def _delete(self, stats):
        for name in stats.matched:
            if stats.dry_run:
                self.logger.info(f"DRY RUN: would delete {name}")
                continue
            try:
                Path(name).unlink()
                self.logger.debug(f"Deleted: {name}")
            except OSError as e:
                self.logger.warning(f"Failed to delete {name}: {e}")
