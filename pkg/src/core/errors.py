# src/core/errors.py

"""
Exception hierarchy for the Toda workbench.

Validation problems subclass ValueError so callers that only know about
ValueError keep working; numerical failures carry enough context to be
reported by the CLI with exit code 2.
"""


class WorkbenchError(Exception):
    """Base class for every error raised by the workbench"""


class LatticeError(WorkbenchError, ValueError):
    """Invalid lattice state or Hamiltonian argument"""


class FourierError(WorkbenchError, ValueError):
    """Invalid Fourier/mode-coordinate input"""


class MajorantError(WorkbenchError, ValueError):
    """Malformed truncated power-series map"""


class ConfigError(WorkbenchError, ValueError):
    """Experiment configuration failed validation"""

    def __init__(self, field, message):
        self.field = field
        self.detail = message
        super().__init__(f"Invalid config field '{field}': {message}")

    def __reduce__(self):
        return self.__class__, (self.field, self.detail)


class NumericalError(WorkbenchError):
    """A numerical procedure failed"""


class SpectralError(NumericalError):
    """Eigensolver, projector or resolvent failure"""


class IntegrationError(NumericalError):
    """Time integration produced a non-finite state"""

    def __init__(self, step, message):
        self.step = step
        self.detail = message
        super().__init__(f"Integration aborted at step {step}: {message}")

    def __reduce__(self):
        return self.__class__, (self.step, self.detail)
