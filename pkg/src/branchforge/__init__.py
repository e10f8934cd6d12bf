"""Exact invariants and normal forms of irreducible plane curve branches."""

from .branch import INFINITY, PuiseuxBranch, SemigroupData, preprocess, renormalize, semigroup
from .contacts import DifferentialForm, LambdaData, lambda_set, pullback_order, witness_form, zariski_lambda
from .flows import EliminationStep, VectorField, eliminate_term, flow_on_branch, picard_flow_oracle
from .normalform import NormalForm, equivalent, is_normal, random_equivalent_pair, reduce, truncate_at_conductor
from .scalar import Scalar
from .series import BivariatePoly, TruncatedSeries

__all__ = [
    "Scalar",
    "TruncatedSeries",
    "BivariatePoly",
    "PuiseuxBranch",
    "SemigroupData",
    "INFINITY",
    "preprocess",
    "renormalize",
    "semigroup",
    "DifferentialForm",
    "LambdaData",
    "lambda_set",
    "pullback_order",
    "witness_form",
    "zariski_lambda",
    "VectorField",
    "EliminationStep",
    "flow_on_branch",
    "picard_flow_oracle",
    "eliminate_term",
    "NormalForm",
    "reduce",
    "truncate_at_conductor",
    "is_normal",
    "equivalent",
    "random_equivalent_pair",
]
__version__ = "0.1.0"
