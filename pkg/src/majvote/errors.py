"""Exception types shared across the package.

Each class carries the process exit code the CLI maps it to.
"""


class MajvoteError(Exception):
    exit_code = 1


class InvalidInputError(MajvoteError, ValueError):
    """An argument violates a documented precondition."""

    exit_code = 2


class ParseError(InvalidInputError):
    """A structured document could not be parsed."""

    def __init__(self, message, line=None, column=None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column


class InfeasibleMomentsError(InvalidInputError):
    """Sample variance is too large for any Beta distribution with that mean."""


class DegenerateSampleError(InvalidInputError):
    """Sample variance is zero, so no Beta distribution matches it."""


class SizeLimitError(MajvoteError):
    """A problem exceeds a configured enumeration or size guard."""

    exit_code = 4
