"""Exception hierarchy for the string algebra workbench."""

from typing import Optional


class StringAlgebraError(ValueError):
    """Base class for every domain error raised by the workbench."""


class ParseError(StringAlgebraError):
    """Syntax error in algebra or word source text."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        location = ""
        if line is not None:
            location = f" (line {line}" + (f", column {column})" if column is not None else ")")
        super().__init__(f"{message}{location}")


class PresentationError(StringAlgebraError):
    """Structurally broken presentation: dangling vertex, unknown arrow, bad relation."""


class InvalidWordError(StringAlgebraError):
    """A letter sequence that is not a walk, cancels, or meets a relation."""

    def __init__(self, message: str, position: Optional[int] = None, reason: str = ""):
        self.position = position
        self.reason = reason or message
        where = f" at position {position}" if position is not None else ""
        super().__init__(f"{message}{where}")


class SideMismatchError(StringAlgebraError):
    """Words or formulas used on the wrong side of an H-partition, or at the wrong vertex."""


class NonDomesticError(StringAlgebraError):
    """Operation needs a domestic algebra."""


class PreconditionError(StringAlgebraError):
    """Inputs violate an operation's stated precondition."""


class ConsistencyError(StringAlgebraError):
    """An internal contract failed; indicates a bug or a counterexample."""
