"""Exception hierarchy shared across the toolkit."""

from __future__ import annotations


class CtvError(Exception):
    """Base class for all toolkit errors."""


class ParseError(CtvError):
    """Syntax or structural error in MiniVerilog source.

    Carries 1-indexed line and column of the offending token.
    """

    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.line = line
        self.col = col
        if line:
            message = f"{line}:{col}: {message}"
        super().__init__(message)


class ElaborationError(CtvError):
    """Design-level error: bad instantiation, multi-driver net, width clash."""


class AnnotationError(CtvError):
    """Invalid analysis annotations (sources, sinks, assumptions)."""


class SessionError(CtvError):
    """Misuse of the interactive session state machine."""


class StaleArtifactError(CtvError):
    """A localization artifact no longer matches the design or assumptions."""
