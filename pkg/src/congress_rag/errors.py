"""Shared exception types."""

from __future__ import annotations


class BillIdParseError(ValueError):
    """Raised when a bill-id string cannot be parsed.

    The message always names the offending segment.
    """


class DimensionMismatchError(ValueError):
    """Vector dimension does not match the collection dimension."""


class ZeroNormError(ValueError):
    """Cosine similarity is undefined for zero-norm vectors."""


class UnknownCollectionError(KeyError):
    """Named vector collection does not exist."""


class IngestionError(ValueError):
    """A bulk load failed (bad header, malformed row, ...)."""


class ToolError(Exception):
    """Raised by tool handlers to signal a structured, recoverable error.

    Dispatched tools convert this into an error ToolResult rather than
    letting it propagate.
    """

    def __init__(self, error_kind: str, message: str, **extra):
        super().__init__(message)
        self.error_kind = error_kind
        self.message = message
        self.extra = extra


class ProviderError(Exception):
    """Chat or embedding provider failed after exhausting retries."""


class ProviderTimeoutError(ProviderError):
    """Chat provider timed out; surfaced to HTTP callers as 504."""


class TransportError(Exception):
    """HTTP transport failed after exhausting retries."""


class NotFoundError(KeyError):
    """Requested entity (run, scope, row) does not exist."""


class IllegalStateError(RuntimeError):
    """Operation not valid in the current pipeline state."""
