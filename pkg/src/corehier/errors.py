"""Exception types shared across the package.

The CLI maps these onto exit codes: configuration problems exit 2, input
problems exit 3, verification failures exit 4.
"""


class CoreHierError(Exception):
    """Base class for all package errors."""


class ConfigError(CoreHierError):
    """A parameter or configuration value makes the requested operation impossible."""


class InputError(CoreHierError):
    """Input data is malformed, empty, or otherwise unusable."""


class VerificationError(CoreHierError):
    """An empirical check that must hold was violated."""
