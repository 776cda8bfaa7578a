"""Exception types shared across the package."""


class QAsympError(Exception):
    """Base class for all package-specific errors."""


class InvertAtZero(QAsympError):
    """Series inversion requested but the lowest stored coefficient is zero."""


class ExpWithConstantTerm(QAsympError):
    """Series exponential requested for a series with a constant (or lower) term."""


class SeriesTruncationError(QAsympError):
    """A coefficient beyond the truncation order was read."""


class InvalidK(QAsympError):
    """k < 2 passed to an operation defined only for k >= 2."""


class InvalidRho(QAsympError):
    """rho outside the validity range of the requested expansion."""


class NonConvergent(QAsympError):
    """A numeric sum or product cannot converge for the given arguments."""


class TermCapExceeded(QAsympError):
    """The max_terms safety cap was hit before the tail threshold."""


class PoleAtNonpositive(QAsympError):
    """(q;q)_x evaluated at a pole (some q^{x+1+m} = 1)."""


class ReconstructionFailed(QAsympError):
    """Continued-fraction rational reconstruction failed (insufficient precision)."""


class DivisionByZeroBeta(QAsympError):
    """Ratio of Puiseux coefficients requested with a vanishing denominator."""
