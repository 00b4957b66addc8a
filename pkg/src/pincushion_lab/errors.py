"""Exception hierarchy for Pincushion Lab."""


class PincushionError(Exception):
    """Base class for every error raised by this package."""


class GraphError(PincushionError, ValueError):
    """Invalid graph construction or graph operation."""


class TraceError(PincushionError, ValueError):
    """Malformed construction trace."""


class WordError(PincushionError, ValueError):
    """Invalid word, group word, or word operation."""


class LinLabError(PincushionError, ValueError):
    """Invalid input to the matrix laboratory."""


class DimensionLimitError(LinLabError):
    """Tensor generator would exceed the configured dimension limit."""


class NumericalError(LinLabError):
    """Non-finite values appeared during optimization."""


class FormatError(PincushionError, ValueError):
    """Malformed text input (graph, certificate, word, or family file)."""

    def __init__(self, message: str, line: int | None = None) -> None:
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UsageError(PincushionError):
    """Bad command-line invocation."""
