"""Reduction to normal form and the equivalence decision.

:func:`reduce` repeatedly removes the smallest removable coefficient with
:func:`~branchforge.flows.eliminate_term` until only exponents ``i`` with
``i + n`` outside ``Lambda`` (and ``lambda`` itself) remain.  Two normal
forms describe analytically equivalent branches exactly when one is
obtained from the other by a rescaling ``t -> r t``, which multiplies the
coefficient at ``t**i`` by ``r**(i - m)``; :func:`equivalent` decides whether
such an ``r`` exists over the complex numbers.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field, replace

from .branch import (
    INFINITY,
    PuiseuxBranch,
    SemigroupData,
    char_exponents,
    preprocess,
    renormalize,
    semigroup,
)
from .contacts import LambdaData, lambda_set
from .errors import (
    DegenerateChange,
    InvariantDrift,
    NotNormalForm,
    TruncationInsufficient,
)
from .flows import EliminationStep, eliminate_term
from .scalar import ONE, Scalar
from .series import BivariatePoly, eval_on_curve

log = logging.getLogger(__name__)

__all__ = [
    "NormalForm",
    "truncate_at_conductor",
    "reduce",
    "is_normal",
    "equivalent",
    "Equivalence",
    "random_equivalent_pair",
    "apply_coordinate_change",
    "rescale_parameter",
]


@dataclass(frozen=True)
class NormalForm:
    """A reduced parametrization ``(t**n, t**m + sum a_i t**i)``.

    ``coefficients`` holds the nonzero ``a_i`` for ``m < i < c``.
    """

    n: int
    m: int
    lam: float | int
    coefficients: dict = field(hash=False)
    semigroup: SemigroupData = field(compare=False)
    lambda_data: LambdaData = field(compare=False, repr=False)
    audit: tuple[EliminationStep, ...] = field(default=(), compare=False, repr=False)

    @property
    def conductor(self) -> int:
        return self.semigroup.conductor

    def coefficient(self, i: int) -> Scalar:
        return self.coefficients.get(i, Scalar(0))

    def to_branch(self) -> PuiseuxBranch:
        """The normal form as a branch, exact to ``c + n + 2``."""
        terms = {self.m: ONE, **self.coefficients}
        return PuiseuxBranch(self.n, terms, self.conductor + self.n + 2)

    def invariants(self) -> tuple:
        return (self.n, self.m, self.semigroup, self.lambda_data.orders, self.lam)


def _char_terms(b: PuiseuxBranch) -> set[int]:
    return set(char_exponents(b)[1:])


def truncate_at_conductor(b: PuiseuxBranch, S: SemigroupData | None = None) -> PuiseuxBranch:
    """Drop all terms at exponents ``>= c`` (characteristic terms are kept).

    The result is an exact polynomial branch and is given truncation
    ``max(N, c + n + 2)``.  Only the case ``n = 2`` ever has a characteristic
    exponent at or above ``c``.
    """
    S = S or b.semigroup
    c = S.conductor
    if b.truncation < c - 1:
        raise TruncationInsufficient(
            f"terms below the conductor {c} are not all known (truncation {b.truncation})"
        )
    keep = _char_terms(b)
    terms = {e: a for e, a in b.y_terms if e < c or e in keep}
    out = PuiseuxBranch(b.n, terms, max(b.truncation, c + b.n + 2))
    if out == b:
        return b
    if char_exponents(out) != char_exponents(b):
        raise InvariantDrift("truncation at the conductor changed the characteristic exponents")
    return out


def _removable(b: PuiseuxBranch, lam: LambdaData, c: int):
    """Exponents ``j`` with ``a_j != 0``, ``m < j < c``, ``j != lambda`` and ``j + n`` in Lambda."""
    m, n = b.m, b.n
    return [e for e, a in b.y_terms if m < e < c and e != lam.lam and (e + n) in lam]


def reduce(b: PuiseuxBranch) -> NormalForm:
    """Reduce a preprocessed branch to normal form, recording every step."""
    b.check_puiseux()
    S = semigroup(b)
    c = S.conductor
    current = truncate_at_conductor(b, S)
    lam = lambda_set(current, S)
    steps: list[EliminationStep] = []
    while True:
        candidates = _removable(current, lam, c)
        if not candidates:
            break
        j = candidates[0]
        log.debug("eliminating t^%d", j)
        step = eliminate_term(current, j, lam, truncation=c - 1)
        nxt = truncate_at_conductor(step.after, S)
        nxt = PuiseuxBranch(nxt.n, nxt.y_terms, current.truncation)
        S_next = semigroup(nxt)
        lam_next = lambda_set(nxt, S_next)
        if S_next != S or lam_next.orders != lam.orders or lam_next.lam != lam.lam:
            raise InvariantDrift(f"invariants changed while eliminating t^{j}")
        steps.append(replace(step, after=nxt))
        current, lam = nxt, lam_next
    coefficients = {e: a for e, a in current.y_terms if e > current.m}
    nf = NormalForm(b.n, b.m, lam.lam, coefficients, S, lam, tuple(steps))
    ok, violations = is_normal(current, S, lam)
    if not ok:
        raise InvariantDrift(f"reduction left removable terms: {violations}")
    return nf


def is_normal(b: PuiseuxBranch, S: SemigroupData | None = None, lam: LambdaData | None = None):
    """``(ok, violations)``; each violation is ``(exponent, reason)``."""
    S = S or b.semigroup
    c = S.conductor
    keep = _char_terms(b)
    violations = []
    if lam is None:
        if b.truncation < c + b.n:
            b = truncate_at_conductor(b, S)
        lam = lambda_set(b, S)
    for e, _ in b.y_terms:
        if e == b.m:
            continue
        if e >= c and e not in keep:
            violations.append((e, "exponent at or above the conductor"))
        elif e != lam.lam and (e + b.n) in lam:
            violations.append((e, f"{e}+{b.n} is a contact order"))
    return not violations, violations


# ---------------------------------------------------------------------------
# equivalence of normal forms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Equivalence:
    """Verdict of :func:`equivalent` with its certificate.

    ``constraints`` are the pairs ``(e, c)`` meaning ``r**e = c``;
    ``relations`` are the integer relation vectors checked (with their
    products); ``r`` is an explicit scalar when the exponents are coprime,
    otherwise ``r_power = (g, C)`` states ``r**g = C``.
    """

    equivalent: bool
    reason: str
    constraints: tuple = ()
    relations: tuple = ()
    failing_relation: tuple | None = None
    r: Scalar | None = None
    r_power: tuple | None = None

    def __bool__(self) -> bool:
        return self.equivalent


def _xgcd(a: int, b: int):
    """``(g, s, t)`` with ``g = gcd(a, b) = s*a + t*b`` and ``g >= 0``."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def _power_product(values, vector) -> Scalar:
    out = ONE
    for c, k in zip(values, vector):
        if k:
            out = out * (c ** k)
    return out


def solve_power_constraints(constraints):
    """Decide whether ``r**e_k = c_k`` for all k has a solution ``r`` in C*.

    Runs a gcd chain over the exponents; each step produces one generator of
    the relation lattice ``{v : sum v_k e_k = 0}`` and the generators found
    form a basis.  Returns ``(ok, relations, failing, g, C)`` where the
    system is equivalent to ``r**g = C`` when ``ok``.
    """
    exps = [e for e, _ in constraints]
    values = [c for _, c in constraints]
    K = len(exps)
    relations = []
    if K == 0:
        return True, relations, None, 0, ONE
    g = exps[0]
    w = [1] + [0] * (K - 1)
    for k in range(1, K):
        e = exps[k]
        g2, a, bcoef = _xgcd(g, e)
        rel = [(e // g2) * wi for wi in w]
        rel[k] -= g // g2
        product = _power_product(values, rel)
        relations.append((tuple(rel), product))
        if product != ONE:
            return False, relations, (tuple(rel), product), None, None
        w = [a * wi for wi in w]
        w[k] += bcoef
        g = g2
    return True, relations, None, g, _power_product(values, w)


def _lambda_key(lam):
    return "inf" if lam == INFINITY else lam


def equivalent(nf1: NormalForm, nf2: NormalForm) -> Equivalence:
    """Decide analytic equivalence of two normal forms."""
    for label, nf in (("first", nf1), ("second", nf2)):
        ok, violations = is_normal(nf.to_branch(), nf.semigroup, nf.lambda_data)
        if not ok:
            raise NotNormalForm(f"the {label} input is not a normal form: {violations}")
    checks = (
        ("n", nf1.n, nf2.n),
        ("m", nf1.m, nf2.m),
        ("semigroup", nf1.semigroup.generators, nf2.semigroup.generators),
        ("Lambda", nf1.lambda_data.orders, nf2.lambda_data.orders),
        ("lambda", _lambda_key(nf1.lam), _lambda_key(nf2.lam)),
    )
    for name, a, b in checks:
        if a != b:
            return Equivalence(False, f"{name} differs: {a} vs {b}")
    m = nf1.m
    constraints = []
    for i in sorted(set(nf1.coefficients) | set(nf2.coefficients)):
        a1, a2 = nf1.coefficient(i), nf2.coefficient(i)
        if bool(a1) != bool(a2):
            return Equivalence(
                False,
                f"coefficient at t^{i} vanishes on one side only",
                tuple(constraints),
            )
        constraints.append((i - m, a2 / a1))
    ok, relations, failing, g, C = solve_power_constraints(constraints)
    if not ok:
        return Equivalence(
            False,
            "rescaling constraints are inconsistent",
            tuple(constraints),
            tuple(relations),
            failing,
        )
    r = None
    if g == 0 or C == ONE:
        r = ONE
    elif g == 1:
        r = C
    return Equivalence(
        True,
        "related by the rescaling t -> r*t",
        tuple(constraints),
        tuple(relations),
        None,
        r,
        (g, C),
    )


# ---------------------------------------------------------------------------
# random coordinate changes
# ---------------------------------------------------------------------------


def rescale_parameter(b: PuiseuxBranch, r) -> PuiseuxBranch:
    """Apply ``t -> r*t`` with the compensating scaling of ``x`` and ``y``.

    The coefficient at ``t**i`` becomes ``r**(i - m) * a_i``.
    """
    r = Scalar.coerce(r)
    if not r:
        raise DegenerateChange("rescaling factor must be nonzero")
    m = b.m
    return b.with_terms({e: a * r ** (e - m) for e, a in b.y_terms})


def apply_coordinate_change(
    b: PuiseuxBranch,
    a,
    d,
    P: BivariatePoly,
    Q: BivariatePoly,
    r=ONE,
) -> PuiseuxBranch:
    """Image of ``b`` under ``(x, y) -> (a x + P, d y + Q)``, brought back to Puiseux form.

    ``P`` and ``Q`` must lie in (x,y)^2.  The image is renormalized so that
    the new x-component is ``u**n``, preprocessed so that the leading
    y-coefficient is 1, and finally rescaled by ``t -> r t``.
    """
    a, d = Scalar.coerce(a), Scalar.coerce(d)
    if not a or not d:
        raise DegenerateChange("the linear part of the change must be invertible")
    if P.order() < 2 or Q.order() < 2:
        raise DegenerateChange("P and Q must lie in (x,y)^2")
    X = (b.x * a + eval_on_curve(P, b.x, b.y)) / a
    Y = b.y * d + eval_on_curve(Q, b.x, b.y)
    if X.valuation() != b.n:
        raise DegenerateChange(f"image x-component has order {X.valuation()}, expected {b.n}")
    image = renormalize(X, Y)
    pre = preprocess(b.n, image.y_terms, image.truncation).branch
    return rescale_parameter(pre, r) if Scalar.coerce(r) != ONE else pre


def _random_scalar(rng: random.Random, allow_complex: bool = True, bound: int = 4) -> Scalar:
    while True:
        re = Scalar(rng.randint(-bound, bound)) / rng.randint(1, bound)
        im = Scalar(rng.randint(-bound, bound)) / rng.randint(1, bound) if allow_complex and rng.random() < 0.5 else Scalar(0)
        value = re + im * Scalar(0, 1)
        if value:
            return value


def _random_higher_order(rng: random.Random, terms: int = 3, max_degree: int = 3) -> BivariatePoly:
    coeffs = {}
    for _ in range(terms):
        deg = rng.randint(2, max_degree)
        k = rng.randint(0, deg)
        coeffs[(k, deg - k)] = _random_scalar(rng)
    return BivariatePoly(coeffs)


def random_equivalent_pair(b: PuiseuxBranch, seed, identity: bool = False):
    """``(b, b')`` with ``b'`` the image of ``b`` under a random analytic change.

    The change is ``(x, y) -> (a x + P, d y + Q)`` with ``P, Q`` in (x,y)^2,
    followed by renormalization and a random rescaling of the parameter.
    The same seed always gives the same pair.
    """
    if identity:
        return b, apply_coordinate_change(b, ONE, ONE, BivariatePoly.zero(), BivariatePoly.zero())
    rng = random.Random(seed)
    a = _random_scalar(rng)
    d = _random_scalar(rng)
    P = _random_higher_order(rng)
    Q = _random_higher_order(rng)
    r = _random_scalar(rng, bound=3)
    return b, apply_coordinate_change(b, a, d, P, Q, r)
