"""Exception hierarchy shared across the package."""

from __future__ import annotations


class TcmragError(Exception):
    """Base class for all package errors."""


class CorpusFormatError(TcmragError):
    """A corpus record is malformed. Carries line/record context in the message."""


class ChunkingError(TcmragError):
    """Invalid chunking parameters (e.g. overlap >= size)."""


class EntityNameError(TcmragError):
    """An entity name is empty after normalization."""


class DomainRangeError(TcmragError):
    """A triple's subject/object categories violate the relation signature."""


class UnknownEntityError(TcmragError):
    """Lookup of an entity id that is not in the store."""


class PatternError(TcmragError):
    """A path pattern is malformed or category-incompatible."""


class SnapshotError(TcmragError):
    """A snapshot file is corrupt or truncated. Names the offending record."""


class LlmError(TcmragError):
    """Base class for LLM client failures."""


class LlmTransportError(LlmError):
    """Transport-level failure (network, 5xx, rate limit) after retries."""


class ResponseTooLargeError(TcmragError):
    """An LLM response exceeded the configured maximum length."""


class ExtractionAbortedError(TcmragError):
    """Chunk failure rate exceeded the configured threshold."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class GenerationError(TcmragError):
    """Answer generation failed after retrieval succeeded.

    Carries the assembled context bundle so callers can still render evidence.
    """

    def __init__(self, message: str, bundle=None):
        super().__init__(message)
        self.bundle = bundle


class RatingsError(TcmragError):
    """A rating matrix violates the metric preconditions."""


class ConfigError(TcmragError):
    """Configuration file is invalid."""
