"""Exception types shared by every layer."""


class DomainError(ValueError):
    """Input outside the mathematical domain of an operation."""


class RegimeError(ValueError):
    """Formula or branch requested outside its validity regime."""


class AccuracyError(RuntimeError):
    """A requested accuracy could not be reached.

    ``achieved`` carries the best error bound that was obtained, if any.
    """

    def __init__(self, message: str, achieved: float | None = None):
        super().__init__(message)
        self.achieved = achieved


class BoundaryCaseError(ValueError):
    """A degenerate case that the closed formulas do not cover."""


class DegenerateError(ValueError):
    """Not enough usable data points for a fit."""
