"""Exception types raised across the package.

Every error carries an ``exit_code`` so the command-line front end can map
failures onto its documented exit statuses without string matching.
"""

from __future__ import annotations


class RpcScreenError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class InvalidArgumentError(RpcScreenError, ValueError):
    exit_code = 2


class InputFileError(RpcScreenError, OSError):
    exit_code = 3


class DataValidationError(RpcScreenError, ValueError):
    """Input data is well-formed but unusable (constant column, ragged rows...)."""

    exit_code = 4

    def __init__(self, message: str, row: int | None = None, col: int | None = None):
        super().__init__(message)
        self.row = row
        self.col = col


class DegenerateInputError(DataValidationError):
    """The centered response is identically zero."""


class ConfigError(RpcScreenError, ValueError):
    exit_code = 2

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class NumericalError(RpcScreenError, ArithmeticError):
    exit_code = 5

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class FactorizationError(NumericalError):
    """Cholesky hit a non-positive pivot; ``index`` is the 0-based pivot."""
