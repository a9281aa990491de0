"""Statistics and scaled Student-t fits for linear combinations of Student-t RVs."""

from .errors import (
    ConvergenceError,
    DegenerateRangeError,
    DomainError,
    InfeasibleFitError,
    MomentError,
    NoSolutionError,
    TLinCombError,
    UnsupportedError,
)
from .specfun import Accuracy, DEFAULT_ACCURACY

__version__ = "0.1.0"
