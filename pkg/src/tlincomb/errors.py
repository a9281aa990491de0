"""Exception types shared across the package."""


class TLinCombError(Exception):
    """Base class for all library errors."""


class DomainError(TLinCombError, ValueError):
    """An argument lies outside the mathematical domain of the function."""


class ConvergenceError(TLinCombError, RuntimeError):
    """A series or continued fraction failed to converge within its term cap.

    Carries the truncation diagnostics of the failed computation in
    ``diagnostics`` when the caller tracks them.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics


class MomentError(TLinCombError, ValueError):
    """A requested moment does not exist (order >= degrees of freedom)."""


class InfeasibleFitError(TLinCombError, ValueError):
    """The target statistics lie outside the reachable set of the fit family."""


class NoSolutionError(TLinCombError, ValueError):
    """The bisection target is outside the bracketing interval."""


class UnsupportedError(TLinCombError, ValueError):
    """The operation is not defined for the requested configuration."""


class DegenerateRangeError(TLinCombError, ValueError):
    """Histogram construction received samples with zero spread."""
