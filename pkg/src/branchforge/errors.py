"""Exception hierarchy.

Two families matter to callers:

* :class:`InputError` and its subclasses signal that the *input* is not
  acceptable (bad document, bad series, not a singular branch, ...).  The
  command line tool maps them to exit status 2.
* :class:`ContractViolation` and its subclasses signal that an internal
  consistency check failed.  Seeing one means a bug, not bad input; the
  command line tool maps them to exit status 3.
"""

from __future__ import annotations


class BranchforgeError(Exception):
    """Base class for all errors raised by the package."""


class InputError(BranchforgeError, ValueError):
    """The input violates a documented precondition."""


class ContractViolation(BranchforgeError, AssertionError):
    """An internal invariant or postcondition failed."""


# -- series ---------------------------------------------------------------


class NonzeroConstantTerm(InputError):
    """An inner series passed to composition has a nonzero constant term."""


class BadValuation(InputError):
    """A series has the wrong valuation for the requested operation."""


class NotUnitOne(InputError):
    """A root was requested of a series whose constant term is not 1."""


class ZeroConstantTerm(InputError):
    """A reciprocal was requested of a series with zero constant term."""


class TruncationInsufficient(InputError):
    """The known part of a series is too short for a guaranteed answer."""


# -- branches -------------------------------------------------------------


class SmoothOrDegenerate(InputError):
    """The parametrization is smooth, reducible, or not a valid branch."""


class NonPrimitive(SmoothOrDegenerate):
    """The parametrization is not injective: the exponents share a factor."""


class BadLeadingCoefficient(InputError):
    """A leading coefficient is not the required value."""


class DocumentError(InputError):
    """A JSON document failed schema validation."""


# -- contacts and flows ---------------------------------------------------


class NoSuchContact(InputError):
    """No differential form reaches the requested contact order."""


class NotFlowEligible(InputError):
    """A vector field does not have the required orders at the origin."""


class PreconditionViolated(ContractViolation):
    """A witness form does not meet the flow eligibility conditions."""


class NonTermination(ContractViolation):
    """The flow recursion did not stabilise within its safety cap."""


class AffineLawViolated(ContractViolation):
    """The coefficient response along a flow is not affine in time."""


class ZeroBeta(ContractViolation):
    """The slope of the affine response vanished."""


class InvariantDrift(ContractViolation):
    """An analytic invariant changed during reduction."""


# -- normal forms ---------------------------------------------------------


class NotNormalForm(InputError):
    """A branch passed as a normal form has removable terms."""


class DegenerateChange(InputError):
    """A coordinate change is not invertible at the origin."""
