"""Exception hierarchy.

Validation problems (bad parameters, bad designs, mismatched grids) derive
from :class:`ValidationError`; numerical failures (singular superpotentials,
nodeful solutions, non-convergence) derive from :class:`NumericalError`.
The CLI maps the two families to different exit codes.
"""


class ScaledSusyError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(ScaledSusyError, ValueError):
    """Inputs violate a documented precondition."""


class NumericalError(ScaledSusyError, ArithmeticError):
    """A numerical procedure failed or produced an inconsistent result."""


class DomainError(ValidationError):
    """Argument outside the mathematical domain of an operation."""


class GridMismatchError(ValidationError):
    """Two grid functions that must share a grid do not."""


class OutOfDomainError(ValidationError):
    """Evaluation requested outside a tabulated or sampled range."""


class DesignError(ValidationError):
    """A spectral design target cannot be realised."""


class SameSignError(DesignError):
    pass


class IntervalError(DesignError):
    pass


class AccuracyError(NumericalError):
    """Series evaluation did not converge within the iteration cap.

    The partial sum reached so far is kept in ``partial``.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class SingularityError(NumericalError):
    """The superpotential denominator vanished or went negative."""


class NodefulSolutionError(NumericalError):
    """A solution meant to be zero-free has a node.

    ``location`` holds the (bisection refined) position of the first zero
    when one was found on the grid, else ``None``.
    """

    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class GridTooNarrowError(NumericalError):
    """Eigenvectors still have appreciable amplitude at the box walls."""


class EigenSolverError(NumericalError):
    pass


class DegenerateTestFunctionError(NumericalError):
    """A residual was requested for a test function of zero norm."""
