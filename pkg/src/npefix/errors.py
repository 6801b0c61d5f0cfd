"""Shared exception types for the npefix toolchain."""

from __future__ import annotations


class MiniJError(Exception):
    """Base for all language-level errors."""


class MiniJSyntaxError(MiniJError):
    def __init__(self, message: str, path: str, offset: int, line: int, col: int):
        super().__init__(f"{path}:{line}:{col}: syntax error: {message}")
        self.path = path
        self.offset = offset
        self.line = line
        self.col = col


class MiniJTypeError(MiniJError):
    def __init__(self, message: str, path: str = "<memory>", span=None):
        loc = f"{path}" if span is None else f"{path}@{span.start}-{span.end}"
        super().__init__(f"{loc}: type error: {message}")
        self.path = path
        self.span = span


class AlreadyInstrumentedError(MiniJError):
    """Raised when a transform is asked to instrument code that already
    contains reserved-prefix identifiers."""


class CorpusError(Exception):
    """A corpus case violates its manifest contract."""


class InterpreterLimitError(Exception):
    """Execution exceeded a safety budget (steps or call depth)."""
