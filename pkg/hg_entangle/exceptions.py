"""Error hierarchy and process exit codes."""

from enum import Enum
from typing import Any, Dict, Optional


class ExitCode(int, Enum):
    """Process exit codes returned by the CLI"""

    OK = 0
    INTERNAL_ERROR = 1
    USAGE_ERROR = 2  # argparse uses 2 as well
    CONVERGENCE_ERROR = 3
    INVARIANT_VIOLATION = 4
    INPUT_ERROR = 5


class HGEntangleError(Exception):
    """Base class for every error raised by the library.

    Args:
        message: Human readable description
        **context: Offending values (index tuples, cells, field paths, ...)
    """

    exit_code: ExitCode = ExitCode.INTERNAL_ERROR

    def __init__(self, message: str, **context: Any):
        super().__init__(message)
        self.message = message
        self.context: Dict[str, Any] = context

    def __str__(self) -> str:
        if not self.context:
            return self.message
        details = ", ".join(f"{key}={value!r}" for key, value in self.context.items())
        return f"{self.message} ({details})"


class QuadratureError(HGEntangleError):
    """Gauss-Hermite rule cannot integrate the requested indices exactly."""

    exit_code = ExitCode.CONVERGENCE_ERROR


class ConvergenceError(HGEntangleError):
    """A truncated series did not meet its tail tolerance."""

    exit_code = ExitCode.CONVERGENCE_ERROR


class InvariantError(HGEntangleError):
    """A numerical self-check failed."""

    exit_code = ExitCode.INVARIANT_VIOLATION


class UnitarityError(InvariantError):
    """An HG/LG conversion block is not unitary."""


class TruncationError(HGEntangleError):
    """A state needs conversion blocks beyond the configured cap."""

    exit_code = ExitCode.INPUT_ERROR


class InputError(HGEntangleError, ValueError):
    """An operation precondition is violated."""

    exit_code = ExitCode.INPUT_ERROR


class StateFormatError(InputError):
    """A serialized state document is malformed.

    Args:
        message: What is wrong
        line: 1-based line of a JSON syntax error
        column: 1-based column of a JSON syntax error
        path: Field path of a schema violation, e.g. ``entries/3/s``
    """

    def __init__(
        self,
        message: str,
        line: Optional[int] = None,
        column: Optional[int] = None,
        path: Optional[str] = None,
    ):
        context: Dict[str, Any] = {}
        if line is not None:
            context["line"] = line
            context["column"] = column
        if path is not None:
            context["path"] = path
        super().__init__(message, **context)
        self.line = line
        self.column = column
        self.path = path
