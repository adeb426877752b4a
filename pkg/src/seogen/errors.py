"""Shared exception hierarchy.

The CLI maps these onto its exit codes: ValidationError (and subclasses)
exit 3, OSError exits 4, TransportError exits 4, anything else exits 5.
"""

from __future__ import annotations


class SeogenError(Exception):
    """Base class for package-specific failures."""


class ValidationError(SeogenError, ValueError):
    """Input violates a documented contract (bad config, bad record, bad ids)."""


class ParseError(ValidationError):
    """A record or file could not be parsed; carries location context."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        loc = ""
        if path is not None:
            loc = f"{path}:" if line is None else f"{path}:{line}:"
        super().__init__(f"{loc} {message}".strip())
        self.path = path
        self.line = line


class TransportError(SeogenError):
    """An external client (NER, search volumes) failed."""


class SearchSpaceError(ValidationError):
    """Exhaustive search refused: the configured space exceeds the guard."""


class InternalError(SeogenError):
    """An invariant the code relies on was violated."""
