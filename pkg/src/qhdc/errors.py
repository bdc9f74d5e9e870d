"""Exception hierarchy shared by every qhdc module."""


class QHDCError(Exception):
    """Base class for all qhdc errors."""


class InvalidArgumentError(QHDCError, ValueError):
    """Malformed or mutually inconsistent arguments."""


class InvalidDimensionError(InvalidArgumentError):
    """A vector dimension violates a structural rule (too small, not a power of two)."""


class InsufficientDataError(InvalidArgumentError):
    """A training set or fold lacks a class or has too few samples."""


class UndefinedSimilarityError(QHDCError, ValueError):
    """Cosine similarity requested for a zero-norm vector."""


class DegenerateVectorError(QHDCError, ValueError):
    """A vector carries no signal (all-zero prototype, RMS of zero)."""


class ResourceLimitError(QHDCError):
    """Requested register exceeds the configured qubit cap."""


class ImpossibleOutcomeError(QHDCError):
    """Projection onto a measurement outcome of zero probability."""


class CancellationError(QHDCError):
    """A coherent sum of states vanished (success amplitude of zero)."""


class FormatError(QHDCError, ValueError):
    """Input file does not follow the expected binary layout."""
