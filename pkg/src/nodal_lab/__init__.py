"""Random-matrix spectral laboratory for nodal domains of G(n, p) eigenvectors."""
from .errors import (
    ConfigurationError,
    DataError,
    DomainError,
    IllConditionedError,
    MultiplicityError,
    NodalLabError,
    NumericError,
    SingularityError,
    UndefinedSignError,
)
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ConfigurationError",
    "DataError",
    "DomainError",
    "IllConditionedError",
    "MultiplicityError",
    "NodalLabError",
    "NumericError",
    "SingularityError",
    "UndefinedSignError",
]
