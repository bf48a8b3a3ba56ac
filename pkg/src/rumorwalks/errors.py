"""Shared exception types."""

__all__ = [
    "RumorWalksError",
    "InvalidParameterError",
    "GenerationFailureError",
    "LoadError",
    "ConfigError",
    "FitError",
    "TranscriptCorruptError",
]


class RumorWalksError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParameterError(RumorWalksError, ValueError):
    """A caller-supplied parameter violates a documented precondition."""


class GenerationFailureError(RumorWalksError, RuntimeError):
    """A randomized graph generator exhausted its retry budget."""


class LoadError(RumorWalksError, ValueError):
    """An edge-list file is malformed or violates a graph invariant."""


class ConfigError(RumorWalksError, ValueError):
    """An experiment config file could not be parsed or validated."""


class FitError(RumorWalksError, ValueError):
    """A growth-model fit was requested on degenerate sweep data."""


class TranscriptCorruptError(RumorWalksError, RuntimeError):
    """A coupling transcript is internally inconsistent."""
