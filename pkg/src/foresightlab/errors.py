"""Exception taxonomy shared across the package.

Every error that should abort a CLI run with a config/usage exit code
derives from ForesightError so the dispatcher can catch one base class.
"""

from __future__ import annotations


class ForesightError(Exception):
    """Base class for all package-specific failures."""


class ConfigError(ForesightError):
    """Bad configuration value or unknown key.

    Carries the offending field name so callers can emit machine-readable
    diagnostics.
    """

    def __init__(self, field: str, message: str) -> None:
        self.field = field
        super().__init__(f"{field}: {message}")


class PathValidityError(ForesightError):
    """A simulated path violated positivity."""


class StructuralError(ForesightError):
    """Mismatched grids, off-grid event times, or malformed ladders."""


class CapabilityError(ForesightError):
    """Requested closed-form result is not available for this model."""


class NoEventError(ForesightError):
    """No seed in the configured range produced the target event."""
