# src/core/__init__.py

"""
Core package for the Toda lattice workbench: lattice states, Fourier and
Birkhoff coordinates, the doubled Jacobi spectrum, symplectic dynamics and
the majorant power-series calculus.
"""
from .errors import (
    ConfigError,
    FourierError,
    IntegrationError,
    LatticeError,
    MajorantError,
    NumericalError,
    SpectralError,
    WorkbenchError,
)

__all__ = [
    "WorkbenchError",
    "LatticeError",
    "FourierError",
    "MajorantError",
    "ConfigError",
    "NumericalError",
    "SpectralError",
    "IntegrationError",
]
