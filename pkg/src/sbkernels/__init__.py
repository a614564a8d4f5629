"""Segal-Bargmann kernel families for Dunkl (Coxeter) and SU(2) settings.

The package evaluates the A, B and C kernels on both sides, the heat kernels
they are built from, and checks the algebraic identities relating them with
certified series truncation and Gaussian / Haar quadrature.
"""

from sbkernels.errors import (
    ConvergenceError,
    DomainError,
    InvariantError,
    MeasureMismatchError,
    RankError,
)
from sbkernels.truncation import TruncatedSum

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError",
    "DomainError",
    "InvariantError",
    "MeasureMismatchError",
    "RankError",
    "TruncatedSum",
]
