# src/utils/__init__.py

"""
Utils package for the Toda lattice workbench
"""
from .cleanup import CleanupManager, CleanupStats
from .logger import WorkbenchLogger
from .reporting import ReportUtils, config_hash

__all__ = [
    "CleanupManager",
    "CleanupStats",
    "WorkbenchLogger",
    "ReportUtils",
    "config_hash",
]
