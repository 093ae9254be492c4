"""Shared exception taxonomy."""

from __future__ import annotations


class SchemaError(ValueError):
    """Feature schema mismatch (wrong width, names, or hash)."""


class ConfigurationError(ValueError):
    """Invalid or missing configuration (unknown keys, bad ranges)."""


class ProviderError(RuntimeError):
    """A linguistic annotation provider failed; message names the provider."""


class NumericError(ArithmeticError):
    """Non-finite values where finite numerics are required."""


class SplitError(ValueError):
    """Split plan construction or verification failed fatally."""


class SegmentOverflowError(ValueError):
    """A token segment exceeds the encoder budget; names the segment.

    Raised instead of ever silently truncating a paragraph.
    """
