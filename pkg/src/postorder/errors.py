class PostorderError(Exception):
    """Base class for domain errors (CLI exit code 1)."""


class ValidationError(PostorderError, ValueError):
    """An object violates one of its invariants."""


class DimensionMismatch(PostorderError, ValueError):
    pass


class CertificateError(PostorderError):
    """A computed certificate failed its exact re-verification."""


class ComparableError(PostorderError):
    """A separating ensemble was requested for a comparable pair."""
