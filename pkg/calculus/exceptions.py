"""
Errors reported against warplang source text.
"""
from typing import Optional


class WarplangError(Exception):
    """Base class for warplang errors; carries the source position when known."""

    def __init__(
        self,
        message: str,
        line: Optional[int] = None,
        column: Optional[int] = None,
        rule: Optional[str] = None,
    ):
        self.message = message
        self.line = line
        self.column = column
        self.rule = rule
        super().__init__(self.message)

    @classmethod
    def at(cls, span, message: str, **kwargs):
        """Build the error positioned at a syntax node's span (which may be None)."""
        if span is None:
            return cls(message, **kwargs)
        return cls(message, line=span.line, column=span.column, **kwargs)

    def location(self) -> str:
        if self.line is None:
            return ''
        if self.column is None:
            return f"{self.line}"
        return f"{self.line}:{self.column}"

    def format(self, filename: Optional[str] = None) -> str:
        """Render as ``file:line:column: message``."""
        parts = [p for p in (filename, self.location()) if p]
        prefix = ':'.join(parts)
        body = f"[{self.rule}] {self.message}" if self.rule else self.message
        return f"{prefix}: {body}" if prefix else body


class ParseError(WarplangError):
    """Lexical or syntactic error, or a duplicate top-level name."""
    pass


class TypingError(WarplangError):
    """Raised by the checker and the elaborator."""
    pass


class CoercionMismatch(TypingError):
    """A coercion was applied to a type it does not accept."""

    def __init__(self, message: str, coercion=None, actual=None, **kwargs):
        self.coercion = coercion
        self.actual = actual
        kwargs.setdefault('rule', 'coercion')
        super().__init__(message, **kwargs)


class EvaluationError(WarplangError):
    """Internal evaluator failure; unreachable for well-typed programs."""
    pass
