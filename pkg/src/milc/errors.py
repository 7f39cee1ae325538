"""Exception types raised across the package."""


class MilcError(Exception):
    """Base class for all errors raised by milc."""


class ConfigError(MilcError, ValueError):
    """Invalid configuration value or unknown configuration key."""


class ShapeError(MilcError, ValueError):
    """Array dimensions do not line up."""


class EmptyInputError(MilcError, ValueError):
    pass


class NumericError(MilcError, ArithmeticError):
    """A loss or metric became non-finite.

    ``term`` names the offending quantity so the caller can tell an
    exploding entropy term from an exploding conditional term.
    """

    def __init__(self, message, term=None):
        super().__init__(message)
        self.term = term


class InfeasibleError(MilcError, ValueError):
    """A closed-form bound has no finite value for the given inputs."""


class IDXFormatError(MilcError, ValueError):
    """Malformed IDX file (bad magic, truncated payload, count mismatch)."""
