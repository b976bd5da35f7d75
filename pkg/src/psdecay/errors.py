"""Exception and warning types shared across the package."""

from __future__ import annotations


class PSDecayError(Exception):
    """Base class for all package errors."""


class GridMismatchError(PSDecayError, ValueError):
    """Two fields (or a field and a buffer) live on different grids."""


class SpaceError(PSDecayError, ValueError):
    """A field was given in the wrong space (physical vs spectral)."""


class OracleSizeError(PSDecayError, ValueError):
    """The brute-force oracle was asked to sum over too many points."""


class ConditioningError(PSDecayError, ValueError):
    """A linear system needed by a diagnostic is too ill-conditioned."""


class MissingSamplesError(PSDecayError, LookupError):
    """A trajectory lacks the snapshots or moment samples an operation needs."""


class SimulationAbort(PSDecayError, RuntimeError):
    """Time integration stopped early.

    ``trajectory`` holds everything produced up to the last valid step and
    ``last_valid`` is the last snapshot known to be finite and in budget.
    """

    def __init__(self, message, trajectory=None, last_valid=None):
        super().__init__(message)
        self.trajectory = trajectory
        self.last_valid = last_valid


class NaNGuardError(SimulationAbort, FloatingPointError):
    """Non-finite values appeared in a field."""


class WrapAroundBudgetExceeded(SimulationAbort):
    """Too much L2 mass reached the outer part of the periodic x-box."""


class ConfigError(PSDecayError, ValueError):
    """Invalid experiment configuration.

    ``line`` is the 1-based line number when the problem is tied to one line;
    ``field`` names the offending setting for validation failures.
    """

    def __init__(self, message, line=None, field=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
        self.field = field


class ZeroModeWarning(UserWarning):
    """A negative-order x-multiplier met a non-negligible xi = 0 row."""


class AliasingWarning(UserWarning):
    """The 2/3 rule does not fully de-alias the requested nonlinearity."""
