# src/utils/reporting.py

import csv
import hashlib
import json
from datetime import datetime
from pathlib import Path

import numpy as np
from rich.console import Console
from rich.table import Table

from .logger import WorkbenchLogger

HASH_PREFIX = "# config_sha256="


def _json_default(value):
    """Serialize numpy scalars/arrays and tuples"""
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, complex):
        return {"real": value.real, "imag": value.imag}
    if isinstance(value, (set, tuple)):
        return list(value)
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def config_hash(config):
    """sha256 of the canonical (sorted-key) JSON form of a config dict"""
    canonical = json.dumps(config, sort_keys=True, default=_json_default, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _format_cell(value):
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def _parse_cell(text):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            continue
    return text


# ====== REPORT UTILITIES ======
class ReportUtils:
    """Writers for experiment CSV series and JSON summaries"""

    def __init__(self, report_dir="reports"):
        self.report_dir = Path(report_dir)
        self.logger = WorkbenchLogger(name="ReportUtils")
        self.console = Console()
        self._setup_directories()

    def _setup_directories(self):
        """Create report directory structure"""
        self.report_dir.mkdir(parents=True, exist_ok=True)

    def write_csv(self, filename, columns, rows, config):
        """
        Write a series as CSV: a header row, the config hash comment, then the rows.

        Args:
            filename: file name inside report_dir
            columns: column names
            rows: iterable of row sequences
            config: dict hashed into the comment line

        Returns:
            Path of the written file
        """
        path = self.report_dir / filename
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(columns)
            f.write(f"{HASH_PREFIX}{config_hash(config)}\n")
            count = 0
            for row in rows:
                writer.writerow([_format_cell(value) for value in row])
                count += 1

        self.logger.info(f"CSV written: {path} ({count} rows)")
        return path

    @staticmethod
    def read_csv(path):
        """
        Read a CSV written by write_csv.

        Returns:
            dict with "columns", "rows" (parsed numbers) and "config_sha256"
        """
        columns, rows, digest = None, [], None
        with open(path, newline="", encoding="utf-8") as f:
            for line in f:
                if line.startswith(HASH_PREFIX):
                    digest = line[len(HASH_PREFIX):].strip()
                    continue
                if line.startswith("#"):
                    continue
                cells = next(csv.reader([line.rstrip("\n")]))
                if columns is None:
                    columns = cells
                else:
                    rows.append([_parse_cell(cell) for cell in cells])
        return {"columns": columns or [], "rows": rows, "config_sha256": digest}

    def generate_json_report(self, results, filename=None):
        """Generate JSON summary report"""
        if not filename:
            filename = f"summary_{datetime.now().strftime('%Y%m%d_%H%M%S')}.json"

        report_path = self.report_dir / filename

        with open(report_path, "w", encoding="utf-8") as f:
            json.dump(results, f, indent=2, sort_keys=True, default=_json_default)

        self.logger.info(f"JSON report generated: {report_path}")
        return report_path

    def print_summary(self, title, summary):
        """Render the scalar entries of a summary dict as a console table"""
        table = Table(title=title, show_lines=False)
        table.add_column("metric", style="cyan")
        table.add_column("value", style="magenta")
        for key, value in summary.items():
            if isinstance(value, (dict, list)):
                continue
            table.add_row(str(key), _format_cell(value) if isinstance(value, float) else str(value))
        self.console.print(table)
        return table
