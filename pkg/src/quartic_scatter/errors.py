"""Exception hierarchy shared by the numerical modules and the CLI."""


class QuarticError(Exception):
    """Base class for all library errors."""


class BranchPointError(QuarticError, ValueError):
    """Evaluation requested at the branch point z = 0."""


class UnsupportedFamilyError(QuarticError, ValueError):
    """Operation not defined for the given boundary-condition family."""


class NearEigenvalueError(QuarticError, ArithmeticError):
    """The requested point sits on (or numerically at) an eigenvalue."""

    def __init__(self, message, eigenvalue=None):
        super().__init__(message)
        self.eigenvalue = eigenvalue


class ConsistencyError(QuarticError, RuntimeError):
    """Two independent routes to the same quantity disagree."""


class DegeneracyError(QuarticError, ArithmeticError):
    """A numerical construction became degenerate (stiffness, rank loss)."""
