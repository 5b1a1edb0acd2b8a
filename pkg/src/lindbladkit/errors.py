"""Exception types shared across the package.

The CLI maps these onto distinct exit codes, so keep the split between
configuration problems and physics-level failures.
"""


class LindbladKitError(Exception):
    """Base class for all package errors."""


class ConfigError(LindbladKitError):
    """Malformed or inconsistent run configuration."""


class PhysicsError(LindbladKitError):
    """A physically invalid model or a simulation that left the physical regime."""


class CompletePositivityError(PhysicsError):
    """Rate model violates complete positivity (dephasing below the decay-induced floor)."""


class PositivityError(PhysicsError):
    """State positivity (or trace/Hermiticity) drifted beyond tolerance during evolution."""

    def __init__(self, message: str, time: float | None = None):
        super().__init__(message)
        self.time = time
