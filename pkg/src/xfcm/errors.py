"""Exception types shared across the package."""


class CognitiveMapError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(CognitiveMapError, ValueError):
    """A value or structure violates a construction-time or call-time contract."""


class VocabularyError(CognitiveMapError, ValueError):
    """A linguistic term is not part of the relevant vocabulary."""


class DataError(CognitiveMapError, ValueError):
    """A dataset is incomplete or degenerate for the requested operation."""
