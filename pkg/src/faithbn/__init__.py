"""Exact d-separation, faithfulness and independence constraints for Bayesian networks."""

from .discrete import CptParams, JointTable, StateSpace
from .errors import CycleError, GuardError, InputError, PreconditionError
from .gaussian import CovarianceMatrix, LinearGaussianParams
from .graph import Dag, IndependenceStatement, d_separated

__all__ = [
    "CptParams",
    "CovarianceMatrix",
    "CycleError",
    "Dag",
    "GuardError",
    "IndependenceStatement",
    "InputError",
    "JointTable",
    "LinearGaussianParams",
    "PreconditionError",
    "StateSpace",
    "d_separated",
]
