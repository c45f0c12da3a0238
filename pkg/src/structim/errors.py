"""Exception types shared across the package.

The CLI maps these to exit codes: DataError -> 3, NumericalError -> 4.
"""


class StructimError(Exception):
    """Base class for package errors."""


class DataError(StructimError):
    """Malformed, inconsistent, or insufficient input data."""


class NumericalError(StructimError):
    """A numerical routine failed to converge or produced unusable output."""
