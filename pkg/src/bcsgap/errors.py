"""Exception hierarchy shared by all modules."""


class BcsGapError(Exception):
    """Base class for library errors."""


class DomainError(BcsGapError, ValueError):
    """An argument lies outside the domain of the operation."""


class BracketError(BcsGapError, ValueError):
    """A root finder was given an interval without a sign change."""


class NoSolutionError(BcsGapError, ValueError):
    """The equation provably has no solution for the given data."""


class NonConvergenceError(BcsGapError, RuntimeError):
    """An iterative method hit its cap.

    ``best`` holds the last estimate (a float, an array or a result object).
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class NoSuperconductivityError(BcsGapError, RuntimeError):
    """The linearized criterion stays below one down to the temperature floor."""
