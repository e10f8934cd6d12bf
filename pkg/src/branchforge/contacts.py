"""Contact orders of holomorphic 1-forms with a branch.

The contact order of ``omega = A dx + B dy`` with the branch ``phi`` is
``ord_t(phi^* omega) + 1``, where ``phi^* omega = (A(phi) x' + B(phi) y') dt``.
The set of all contact orders is ``Lambda``; every ``s + n`` with ``s`` in the
semigroup belongs to it (take ``g dx``), and Zariski's invariant is
``lambda = min(Lambda \\ S) - n``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property

from .branch import INFINITY, AboveTruncation, PuiseuxBranch, SemigroupData
from .errors import (
    InvariantDrift,
    NoSuchContact,
    PreconditionViolated,
    TruncationInsufficient,
)
from .scalar import Scalar
from .series import BivariatePoly, TruncatedSeries, eval_on_curve, reciprocal
from . import staircase

log = logging.getLogger(__name__)

__all__ = [
    "DifferentialForm",
    "LambdaData",
    "Colinearity",
    "pullback",
    "pullback_order",
    "lambda_set",
    "zariski_lambda",
    "witness_form",
    "value_witness",
    "colinearity_order",
    "contact_transfer_residual",
    "lambda_form",
]


@dataclass(frozen=True)
class DifferentialForm:
    """The 1-form ``A dx + B dy`` with polynomial coefficients."""

    A: BivariatePoly
    B: BivariatePoly

    def __post_init__(self):
        if self.A.is_zero() and self.B.is_zero():
            raise ValueError("a differential form needs A or B nonzero")

    @classmethod
    def from_terms(cls, a_terms=None, b_terms=None) -> "DifferentialForm":
        """Build from ``{(k, l): coefficient}`` maps for A and B."""
        return cls(BivariatePoly(a_terms or {}), BivariatePoly(b_terms or {}))

    def scaled_by_x(self, k: int) -> "DifferentialForm":
        """``x**k * omega``."""
        return DifferentialForm(self.A.shift(k), self.B.shift(k))

    def is_flow_eligible(self) -> bool:
        """A in (x,y)^2 and ord_x B(x,0) >= 2."""
        return self.A.order() >= 2 and self.B.x_restriction_order() >= 2

    def __str__(self) -> str:
        return f"({_poly_text(self.A)}) dx + ({_poly_text(self.B)}) dy"


def _poly_text(p: BivariatePoly) -> str:
    parts = []
    for (k, l), c in sorted(p.coefficients.items()):
        mono = "*".join(s for s in (f"x^{k}" if k else "", f"y^{l}" if l else "") if s) or "1"
        parts.append(f"({c})*{mono}")
    return " + ".join(parts) or "0"


def lambda_form(n: int, m: int) -> DifferentialForm:
    """``-m*y dx + n*x dy``, whose contact with a short form is ``lambda + n``."""
    return DifferentialForm(BivariatePoly({(0, 1): -m}), BivariatePoly({(1, 0): n}))


def pullback(b: PuiseuxBranch, w: DifferentialForm) -> TruncatedSeries:
    """The series ``A(phi) x' + B(phi) y'``."""
    a = eval_on_curve(w.A, b.x, b.y)
    bb = eval_on_curve(w.B, b.x, b.y)
    return a * b.xdot + bb * b.ydot


def pullback_order(b: PuiseuxBranch, w: DifferentialForm):
    """Contact order ``ord_t(phi^* omega) + 1`` or :data:`AboveTruncation`."""
    v = pullback(b, w).valuation()
    return AboveTruncation if v is None else v + 1


# ---------------------------------------------------------------------------
# Lambda
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LambdaData:
    """Contact orders up to ``c + n`` with witnesses, and Zariski's lambda.

    Witnesses are produced on demand from a standard basis of the pullback
    module: the form of least order ``e`` in each residue class modulo
    ``n``; the witness for ``v = e + 1 + k*n`` is ``x**k`` times that form.
    """

    orders: tuple[int, ...]
    lam: float | int
    n: int = field(compare=False)
    bound: int = field(compare=False)
    basis: dict = field(compare=False, repr=False, default_factory=dict)

    def __contains__(self, v: int) -> bool:
        if v > self.bound:
            return True
        return v in self._order_set

    @cached_property
    def _order_set(self) -> frozenset:
        return frozenset(self.orders)

    def witness(self, v: int) -> DifferentialForm:
        if v not in self._order_set:
            raise NoSuchContact(f"no form has contact order {v}")
        e = v - 1
        element = self.basis[e % self.n]
        k = (e - element.order) // self.n
        A, B = element.tag
        return DifferentialForm(A, B).scaled_by_x(k)

    @cached_property
    def witnesses(self) -> dict[int, DifferentialForm]:
        return {v: self.witness(v) for v in self.orders}


def lambda_set(b: PuiseuxBranch, semigroup: SemigroupData | None = None) -> LambdaData:
    """``Lambda`` up to ``c + n`` with witnesses, and ``lambda``."""
    S = semigroup or b.semigroup
    n, c = b.n, S.conductor
    window = c + n
    if b.truncation < window:
        raise TruncationInsufficient(
            f"Lambda up to c+n={window} needs truncation >= {window}, got {b.truncation}"
        )
    basis = staircase.module_echelon(staircase.form_generators(n, b.y, window), n, window)
    orders = tuple(e + 1 for e in staircase.attained_orders(basis, n, window))
    order_set = set(orders)
    missing = [s + n for s in range(window - n + 1) if s in S and s + n not in order_set]
    if missing:
        raise InvariantDrift(f"semigroup shifts {missing} missing from Lambda")
    outside = [v for v in orders if v not in S]
    lam = (min(outside) - n) if outside else INFINITY
    if lam != INFINITY and not (b.m < lam < c):
        raise InvariantDrift(f"lambda = {lam} outside ({b.m}, {c})")
    return LambdaData(orders, lam, n, window, basis)


def zariski_lambda(b: PuiseuxBranch) -> float | int:
    """``min(Lambda \\ S) - n``, or :data:`~branchforge.branch.INFINITY`."""
    return lambda_set(b).lam


def value_witness(b: PuiseuxBranch, j: int, semigroup: SemigroupData | None = None) -> BivariatePoly:
    """A polynomial ``g`` with ``ord_t g(phi) = j`` for ``j`` in the semigroup."""
    S = semigroup or b.semigroup
    if j not in S:
        raise NoSuchContact(f"{j} is not in the semigroup")
    window = j + 1
    basis = staircase.module_echelon(staircase.function_generators(b.y, window), b.n, window)
    element = basis.get(j % b.n)
    if element is None or element.order > j:
        raise InvariantDrift(f"staircase did not reach the semigroup element {j}")
    (g,) = element.tag
    return g.shift((j - element.order) // b.n)


def witness_form(b: PuiseuxBranch, j: int, lam_data: LambdaData | None = None) -> DifferentialForm:
    """A flow-eligible form of contact ``j + n``.

    Cases, in order: ``g dx`` with ``ord g(phi) = j`` when ``j`` is in the
    semigroup; ``y**(p-1) dy`` when ``j + n = p*m``; otherwise a form from
    the staircase over flow-eligible forms.
    """
    S = b.semigroup
    lam_data = lam_data or lambda_set(b, S)
    n, m, c = b.n, b.m, S.conductor
    if j + n not in lam_data:
        raise NoSuchContact(f"{j}+{n} is not a contact order of the branch")
    if not (m < j < c) or j == lam_data.lam:
        raise NoSuchContact(f"exponent {j} is not removable (need m < j < c and j != lambda)")
    if j in S:
        g = value_witness(b, j, S)
        omega = DifferentialForm(g, BivariatePoly.zero())
    elif (j + n) % m == 0 and (j + n) // m > 1:
        p = (j + n) // m
        omega = DifferentialForm(BivariatePoly.zero(), BivariatePoly.monomial(0, p - 1))
    else:
        omega = _eligible_witness(b, j + n)
    if not omega.is_flow_eligible():
        raise PreconditionViolated(
            f"witness for j={j} fails A in (x,y)^2 or ord_x B(x,0) >= 2: {omega}"
        )
    v = pullback_order(b, omega)
    if v != j + n:
        raise PreconditionViolated(f"witness for j={j} has contact {v}, expected {j + n}")
    return omega


def _eligible_witness(b: PuiseuxBranch, v: int) -> DifferentialForm:
    window = v
    basis = staircase.module_echelon(
        staircase.eligible_form_generators(b.n, b.y, window), b.n, window
    )
    e = v - 1
    element = basis.get(e % b.n)
    if element is None or element.order > e:
        raise PreconditionViolated(
            f"no flow-eligible form reaches contact {v}; the exponent is not the minimal removable one"
        )
    A, B = element.tag
    return DifferentialForm(A, B).scaled_by_x((e - element.order) // b.n)


# ---------------------------------------------------------------------------
# colinearity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Colinearity:
    """``a*q - b*p = t**order * d(t)`` with ``d(0) = coefficient != 0``."""

    order: int
    coefficient: Scalar
    d: TruncatedSeries


def colinearity_order(u1, u2):
    """Order of colinearity of two parametric vectors, or :data:`AboveTruncation`."""
    (a, b), (p, q) = u1, u2
    det = a * q - b * p
    j = det.valuation()
    if j is None:
        return AboveTruncation
    return Colinearity(j, det.coefficient(j), det.shift(-j))


def contact_transfer_residual(u1, u2, A: TruncatedSeries, B: TruncatedSeries) -> TruncatedSeries:
    """``A*a + B*b - (a/p)*(A*p + B*q)`` for ``u1 = (a, b)``, ``u2 = (p, q)``, ``p(0) != 0``."""
    (a, b), (p, q) = u1, u2
    return A * a + B * b - a * reciprocal(p) * (A * p + B * q)
