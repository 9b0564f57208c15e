"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: configuration problems exit with 2,
capacity limits with 3 and numerical-tolerance failures with 4.
"""


class AdiapathError(Exception):
    """Base class for all errors raised by this package."""


class InputError(AdiapathError, ValueError):
    """A caller supplied an invalid value (bad index, wrong dimension, ...)."""


class ParseError(InputError):
    """A text input could not be parsed. Carries the offending line number."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ConfigError(AdiapathError):
    """An invalid combination of configuration options."""


class CapacityError(AdiapathError):
    """A request exceeds the desk-scale limits this package is built for."""


class AccuracyError(AdiapathError):
    """A numerical tolerance could not be met with the given settings."""
