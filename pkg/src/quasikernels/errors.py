"""Exception hierarchy shared by every module."""


class QkError(Exception):
    """Base class for library errors."""


class InvalidInputError(QkError, ValueError):
    """An argument violates the operation's precondition."""


class PreconditionError(InvalidInputError):
    """A structural precondition (kernel existence, kernel-perfectness) failed."""


class ParseError(InvalidInputError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ResourceLimitError(QkError):
    """Instance is larger than the exhaustive routine accepts."""


class InvariantError(QkError, RuntimeError):
    """An internal invariant did not hold. Always a bug or a mathematical finding."""


class SearchCapExceeded(InvariantError):
    """Exact minimum search hit its size cap without finding a quasi-kernel."""
