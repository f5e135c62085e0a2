"""Exception hierarchy shared by every module of the package."""


class NodalLabError(Exception):
    """Base class for all errors raised by nodal_lab."""


class ConfigurationError(NodalLabError, ValueError):
    """Invalid parameters (probabilities, sizes, tags, thresholds)."""


class DataError(NodalLabError, ValueError):
    """Input data that violates a precondition (non-finite, wrong shape)."""


class DomainError(NodalLabError, ValueError):
    """A spectral parameter outside its domain, e.g. a real spectral point."""


class NumericError(NodalLabError, ArithmeticError):
    """A numerical routine failed to converge."""


class SingularityError(NumericError):
    """Evaluation requested too close to a pole of a Green function."""


class MultiplicityError(NumericError):
    """A null space expected to be one-dimensional is degenerate."""


class UndefinedSignError(NumericError):
    """The sign formula has a vanishing denominator."""


class IllConditionedError(NumericError):
    """A Gram system is too ill-conditioned for the requested basis."""
