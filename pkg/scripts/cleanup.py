#!/usr/bin/env python3
"""
Delete logs, pytest reports and experiment runs older than the retention period.

Usage:
    python scripts/cleanup.py --days 14 --targets experiments --dry-run
"""
import sys
import os
import argparse

project_root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, project_root)

from src.utils.cleanup import CleanupManager
from src.utils.logger import WorkbenchLogger

TARGETS = ["logs", "test_logs", "reports", "experiments"]


def main(argv=None):
    parser = argparse.ArgumentParser(description="Clean up old workbench artifacts")
    parser.add_argument(
        "--days",
        type=int,
        default=30,
        help="Delete files older than this number of days (default: 30)"
    )
    parser.add_argument(
        "--dry-run",
        action="store_true",
        help="List what would be deleted without deleting it"
    )
    parser.add_argument(
        "--targets",
        nargs="+",
        choices=TARGETS,
        help="Targets to clean (default: all)"
    )
    parser.add_argument("--base-dir", default=project_root, help="Project root holding logs/ and reports/")
    args = parser.parse_args(argv)

    manager = CleanupManager(retention_days=args.days, logger=WorkbenchLogger("Cleanup"), base_dir=args.base_dir)
    stats = manager.cleanup_all(dry_run=args.dry_run, targets=args.targets)

    print("\n🧹 CLEANUP SUMMARY")
    print("=" * 50)
    for target, data in stats.items():
        count = len(data.matched)
        verb = "matched" if data.dry_run else "deleted"
        print(f"  {target.upper():<12} {count:>6} files {verb}  ({data.directory})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
