"""Exception types shared across the library.

Validation errors (bad parameters, broken invariants, malformed config) are
ValueErrors; numeric failures (non-finite data, factorizations that did not
converge) are ArithmeticErrors.  The CLI maps the former to exit code 1 and
the latter to exit code 2.
"""


class OverfitLabError(Exception):
    """Base class for all library errors."""


class InvalidParameterError(OverfitLabError, ValueError):
    """An argument is outside its documented range."""


class InvariantViolationError(OverfitLabError, ValueError):
    """A constructed object would violate one of its invariants."""


class ShapeError(OverfitLabError, ValueError):
    """Array dimensions do not match the operation's contract."""


class DomainError(OverfitLabError, ValueError):
    """A value lies outside the mathematical domain of a function."""


class InsufficientTailError(OverfitLabError, ValueError):
    """A tail-block computation was requested with no tail rows (M <= N)."""


class SpectrumTruncationError(OverfitLabError, ValueError):
    """Requested eigenvalues would underflow double precision."""


class ConfigError(OverfitLabError, ValueError):
    """Config text or CLI overrides could not be parsed or validated."""


class PlotFieldError(OverfitLabError, ValueError):
    """A requested plot field is absent from the report."""


class EmptyReportError(OverfitLabError, ValueError):
    """Aggregation was requested over an empty record list."""


class NumericError(OverfitLabError, ArithmeticError):
    """Non-finite inputs or a numerical routine that failed to converge."""


class RankDeficientKernelWarning(UserWarning):
    """A kernel matrix was numerically rank deficient; a pseudo-inverse was used."""
