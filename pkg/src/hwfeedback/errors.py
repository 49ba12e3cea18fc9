"""Exception hierarchy shared by every module of the toolkit."""

from __future__ import annotations


class HwFeedbackError(Exception):
    """Base class for all toolkit errors."""


class InvalidGeometryError(HwFeedbackError, ValueError):
    """A region is degenerate, non-convex or has non-finite coordinates."""


class InvalidArgumentError(HwFeedbackError, ValueError):
    pass


class InfeasibleTargetError(HwFeedbackError, ValueError):
    """A requested IoU cannot be produced by the sampler."""


class ParseError(HwFeedbackError):
    """Malformed dataset input.  ``line``/``column`` are 1-based when known."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            loc = f"line {line}" + (f", column {column}" if column is not None else "")
            message = f"{loc}: {message}"
        super().__init__(message)


class SchemaError(ParseError):
    """A canonical record violates the page-file schema."""

    def __init__(self, message: str, field: str, line: int | None = None):
        self.field = field
        super().__init__(f"{field}: {message}", line=line)


class ProtocolError(HwFeedbackError):
    """The requested evaluation is not defined for the given data."""
