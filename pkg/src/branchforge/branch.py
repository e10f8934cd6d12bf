"""Puiseux branches and their intrinsic invariants.

A branch is stored in the form ``(t**n, sum a_i t**i)`` together with the
truncation ``N`` of the y-series.  :func:`preprocess` brings raw input to
that form; :func:`char_exponents` and :func:`semigroup` compute the
topological data; :func:`renormalize` restores ``x = u**n`` after the
x-component has been perturbed.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property, reduce as _fold
from typing import Mapping

from .errors import (
    BadLeadingCoefficient,
    BadValuation,
    InvariantDrift,
    NonPrimitive,
    SmoothOrDegenerate,
)
from .scalar import ONE, Scalar
from .series import (
    BivariatePoly,
    TruncatedSeries,
    compose,
    compositional_inverse,
    eval_on_curve,
    nth_root_of_unit_series,
)
from . import staircase

log = logging.getLogger(__name__)

__all__ = [
    "AboveTruncation",
    "INFINITY",
    "PuiseuxBranch",
    "SemigroupData",
    "Preprocessed",
    "preprocess",
    "char_exponents",
    "semigroup",
    "semigroup_from_exponents",
    "value_order",
    "renormalize",
    "default_truncation",
]

INFINITY = math.inf


class _AboveTruncationType:
    """Sentinel for "the order is larger than the truncation can certify"."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "AboveTruncation"

    def __reduce__(self):
        return (_AboveTruncationType, ())


AboveTruncation = _AboveTruncationType()


def _normalize_terms(terms) -> tuple[tuple[int, Scalar], ...]:
    items = terms.items() if isinstance(terms, Mapping) else terms
    out = {}
    for exp, value in items:
        if not isinstance(exp, int) or isinstance(exp, bool):
            raise TypeError(f"exponent must be an integer, got {exp!r}")
        c = Scalar.coerce(value)
        if c:
            out[exp] = out.get(exp, Scalar(0)) + c
    return tuple(sorted((e, c) for e, c in out.items() if c))


@dataclass(frozen=True)
class PuiseuxBranch:
    """The parametrized branch ``(t**n, sum a_i t**i)`` known modulo ``t**(N+1)``.

    ``y_terms`` may be given as a mapping or as pairs; it is stored as a
    sorted tuple of ``(exponent, Scalar)`` with zero coefficients and
    exponents above the truncation removed.
    """

    n: int
    y_terms: tuple[tuple[int, Scalar], ...]
    truncation: int

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise ValueError("multiplicity n must be a positive integer")
        terms = tuple((e, c) for e, c in _normalize_terms(self.y_terms) if e <= self.truncation)
        if any(e <= 0 for e, _ in terms):
            raise BadValuation("y must have positive valuation")
        object.__setattr__(self, "y_terms", terms)

    # -- views --------------------------------------------------------------

    @property
    def terms(self) -> dict[int, Scalar]:
        return dict(self.y_terms)

    @property
    def m(self) -> int:
        if not self.y_terms:
            raise SmoothOrDegenerate("the y-component vanishes within the truncation")
        return self.y_terms[0][0]

    @property
    def support(self) -> list[int]:
        return [e for e, _ in self.y_terms]

    def coefficient(self, i: int) -> Scalar:
        return self.terms.get(i, Scalar(0))

    @cached_property
    def x(self) -> TruncatedSeries:
        return TruncatedSeries.monomial(self.n, ONE, self.truncation)

    @cached_property
    def y(self) -> TruncatedSeries:
        return TruncatedSeries(dict(self.y_terms), self.truncation)

    @cached_property
    def xdot(self) -> TruncatedSeries:
        return self.x.derivative()

    @cached_property
    def ydot(self) -> TruncatedSeries:
        return self.y.derivative()

    @cached_property
    def semigroup(self) -> "SemigroupData":
        return semigroup(self)

    def with_terms(self, terms, truncation: int | None = None) -> "PuiseuxBranch":
        return PuiseuxBranch(self.n, terms, self.truncation if truncation is None else truncation)

    def truncated(self, truncation: int) -> "PuiseuxBranch":
        return PuiseuxBranch(self.n, self.y_terms, min(truncation, self.truncation))

    def check_puiseux(self) -> None:
        """Raise unless this is a preprocessed Puiseux branch."""
        m = self.m
        if self.n < 2:
            raise SmoothOrDegenerate("multiplicity 1: the branch is smooth")
        if m <= self.n:
            raise BadValuation(f"minimal y-exponent {m} must exceed n = {self.n}")
        if m % self.n == 0:
            raise SmoothOrDegenerate(f"minimal y-exponent {m} is divisible by n = {self.n}; preprocess first")
        if self.coefficient(m) != ONE:
            raise BadLeadingCoefficient(f"leading y-coefficient must be 1, got {self.coefficient(m)}")
        char_exponents(self)

    def __str__(self) -> str:
        terms = " + ".join(_term_text(e, c) for e, c in self.y_terms)
        return f"(t^{self.n}, {terms or '0'} + O(t^{self.truncation + 1}))"


def _term_text(e: int, c: Scalar) -> str:
    if c == ONE:
        return f"t^{e}"
    return f"({c})*t^{e}"


# ---------------------------------------------------------------------------
# characteristic exponents and the semigroup
# ---------------------------------------------------------------------------


def char_exponents(b: PuiseuxBranch) -> tuple[int, ...]:
    """``(beta_0; beta_1, ..., beta_g)`` by the gcd chain over the support."""
    return _char_exponents(b.n, b.support)


def _char_exponents(n: int, support) -> tuple[int, ...]:
    betas = [n]
    e = n
    for exp in sorted(support):
        if e == 1:
            break
        if exp % e:
            betas.append(exp)
            e = math.gcd(e, exp)
    if e != 1:
        raise NonPrimitive(
            f"the exponents share the factor {e}: the parametrization is not injective"
        )
    return tuple(betas)


@dataclass(frozen=True)
class SemigroupData:
    """A numerical semigroup with its minimal generators, conductor and gaps."""

    generators: tuple[int, ...]
    conductor: int
    gaps: tuple[int, ...]
    members_below_conductor: frozenset = field(repr=False, compare=False, default=frozenset())

    def __contains__(self, s: int) -> bool:
        if s < 0:
            return False
        return s >= self.conductor or s not in self._gap_set

    @cached_property
    def _gap_set(self) -> frozenset:
        return frozenset(self.gaps)

    def is_member(self, s: int) -> bool:
        return s in self

    def is_symmetric(self) -> bool:
        """Gorenstein symmetry: ``s in S`` iff ``c - 1 - s`` is not, for ``0 <= s < c``."""
        c = self.conductor
        return all((s in self) != ((c - 1 - s) in self) for s in range(c))

    def apery(self, modulus: int) -> dict[int, int]:
        """Least member in each residue class modulo ``modulus``."""
        out: dict[int, int] = {}
        s = 0
        while len(out) < modulus:
            if s in self and s % modulus not in out:
                out[s % modulus] = s
            s += 1
        return out


def semigroup_generators(betas) -> tuple[int, ...]:
    """Minimal generators from characteristic exponents.

    ``bbar_0 = beta_0``, ``bbar_1 = beta_1`` and
    ``bbar_{k+1} = n_k * bbar_k + beta_{k+1} - beta_k`` with
    ``n_k = e_{k-1} / e_k`` and ``e_k = gcd(beta_0, ..., beta_k)``.
    """
    betas = list(betas)
    bars = [betas[0]]
    if len(betas) == 1:
        return tuple(bars)
    bars.append(betas[1])
    e_prev = betas[0]
    for k in range(1, len(betas) - 1):
        e_k = math.gcd(e_prev, betas[k])
        n_k = e_prev // e_k
        bars.append(n_k * bars[k] + betas[k + 1] - betas[k])
        e_prev = e_k
    return tuple(bars)


def conductor_formula(betas) -> int:
    """``c = sum (e_{k-1} - e_k) beta_k - beta_0 + 1``."""
    total = 0
    e_prev = betas[0]
    for beta in betas[1:]:
        e_k = math.gcd(e_prev, beta)
        total += (e_prev - e_k) * beta
        e_prev = e_k
    return total - betas[0] + 1


def semigroup_from_generators(generators) -> SemigroupData:
    """Conductor and gaps of ``<generators>`` by a membership scan.

    The scan stops once ``min(generators)`` consecutive members are found;
    from there on every integer is a member.
    """
    gens = sorted(set(generators))
    if _fold(math.gcd, gens) != 1:
        raise NonPrimitive(f"generators {gens} are not coprime")
    step = gens[0]
    member = [True]
    run = 1 if step == 1 else 0
    s = 0
    while run < step:
        s += 1
        ok = any(member[s - g] for g in gens if g <= s)
        member.append(ok)
        run = run + 1 if ok else 0
    conductor = s - step + 1
    gaps = tuple(k for k in range(conductor) if not member[k])
    members = frozenset(k for k in range(conductor) if member[k])
    return SemigroupData(tuple(gens), conductor, gaps, members)


def semigroup_from_exponents(betas) -> SemigroupData:
    data = semigroup_from_generators(semigroup_generators(betas))
    if data.conductor != conductor_formula(betas):
        raise InvariantDrift(
            f"conductor scan gives {data.conductor}, formula gives {conductor_formula(betas)}"
        )
    return data


def semigroup(b: PuiseuxBranch) -> SemigroupData:
    """The value semigroup of the branch.

    Generators come from the characteristic exponents; the conductor is
    found by a membership scan and compared with the closed formula.  When
    the truncation reaches ``c + n`` the membership below ``c + n`` is also
    compared with the orders found by the staircase over the functions
    ``y**l`` (an independent path through the actual series).
    """
    data = semigroup_from_exponents(char_exponents(b))
    window = data.conductor + b.n
    if b.truncation >= window:
        basis = staircase.module_echelon(
            staircase.function_generators(b.y, window, track=False), b.n, window
        )
        found = set(staircase.attained_orders(basis, b.n, window))
        expected = {s for s in range(window) if s in data}
        if found != expected:
            raise InvariantDrift(
                "semigroup from characteristic exponents disagrees with the staircase: "
                f"{sorted(found ^ expected)}"
            )
    else:
        log.debug("truncation %d below c+n=%d: staircase cross-check skipped", b.truncation, window)
    return data


def value_order(b: PuiseuxBranch, f: BivariatePoly):
    """``ord_t f(phi(t))`` or :data:`AboveTruncation`."""
    if not f.coefficient(0, 0).is_zero():
        raise ValueError("f must vanish at the origin")
    v = eval_on_curve(f, b.x, b.y).valuation()
    return AboveTruncation if v is None else v


# ---------------------------------------------------------------------------
# preprocessing and renormalization
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Preprocessed:
    """Result of :func:`preprocess`.

    ``substitution`` holds the coefficients of ``s(x)`` (``{k: c}`` for
    ``c*x**k``) subtracted from ``y``; ``scale`` is the factor ``y`` was
    divided by so that the leading coefficient becomes 1.
    """

    branch: PuiseuxBranch
    substitution: dict
    scale: Scalar


def default_truncation(n: int, support) -> int:
    """The automatic truncation ``c + n + 2``."""
    c = semigroup_from_exponents(_char_exponents(n, support)).conductor
    return c + n + 2


def preprocess(n: int, raw_y_terms, truncation: int | None = None) -> Preprocessed:
    """Bring ``(t**n, y(t))`` to Puiseux form.

    Leading y-terms whose exponent is a multiple of ``n`` are removed by the
    change ``y -> y - s(x)``; then ``y`` is scaled so that its leading
    coefficient is 1.  Without an explicit ``truncation`` the input is
    treated as an exact polynomial and the truncation is set to ``c + n + 2``.
    """
    if not isinstance(n, int) or n < 1:
        raise ValueError("n must be a positive integer")
    terms = dict(_normalize_terms(raw_y_terms))
    if truncation is not None:
        terms = {e: c for e, c in terms.items() if e <= truncation}
    if any(e <= 0 for e in terms):
        raise BadValuation("the y-series must have positive valuation")
    if n == 1:
        raise SmoothOrDegenerate("multiplicity 1: the branch is smooth")
    substitution = {}
    for e in sorted(terms):
        if e % n:
            break
        substitution[e // n] = terms.pop(e)
    if not terms:
        raise SmoothOrDegenerate(
            "every exponent is a multiple of n within the truncation: the branch is smooth-equivalent"
        )
    m = min(terms)
    if m < n:
        raise BadValuation(
            f"y has order {m} < n = {n}; exchange the coordinates so that x has the smaller order"
        )
    betas = _char_exponents(n, terms)
    if truncation is None:
        truncation = max(semigroup_from_exponents(betas).conductor + n + 2, m)
    scale = terms[m]
    if scale != ONE:
        inv = scale.inverse()
        terms = {e: c * inv for e, c in terms.items()}
    branch = PuiseuxBranch(n, terms, truncation)
    return Preprocessed(branch, substitution, scale)


def renormalize(x: TruncatedSeries, y: TruncatedSeries) -> PuiseuxBranch:
    """Reparametrize so that the x-component becomes exactly ``u**n``.

    With ``x = t**n * w(t)`` and ``w(0) = 1`` the new parameter is
    ``u = t * w(t)**(1/n)`` (principal root); the branch returned is
    ``(u**n, y(t(u)))``.  The result is known to ``min(Ny, Nx - n + m)``.
    """
    n = x.valuation()
    if n is None or n == 0:
        raise BadValuation("x must have positive valuation")
    if x.coefficient(n) != ONE:
        raise BadLeadingCoefficient(f"leading coefficient of x is {x.coefficient(n)}, expected 1")
    m = y.valuation()
    if m is not None and m <= n:
        raise BadValuation(f"y has order {m}, which must exceed the order {n} of x")
    mv = y.valuation_bound()
    w = x.shift(-n)
    out_truncation = min(y.truncation, x.truncation - n + mv)
    if w.degree() == 0:
        # w is exactly 1 within its truncation: the parameter is unchanged.
        return PuiseuxBranch(n, y.coefficients, out_truncation)
    u = nth_root_of_unit_series(w, n).shift(1)
    t_of_u = compositional_inverse(u)
    new_y = compose(y, t_of_u)
    return PuiseuxBranch(n, new_y.coefficients, min(out_truncation, new_y.truncation))
