"""Formal flows of plane vector fields along a branch, and term elimination.

For a vector field ``E = X1 d/dx + Y1 d/dy`` the time-``s`` flow starting on
the branch is expanded as

    x(t, s) = sum_i X_i(phi(t)) s**i / i!,   y(t, s) = sum_i Y_i(phi(t)) s**i / i!

with ``X_0 = x``, ``Y_0 = y`` and ``X_{i+1} = dX_i/dx * X1 + dX_i/dy * Y1``
(likewise for ``Y``).  :func:`flow_on_branch` evaluates this recursion;
:func:`picard_flow_oracle` computes the same expansion independently by
Picard iteration in ``s``.

:func:`eliminate_term` uses the flow of the field dual to a witness form to
remove one coefficient of the Puiseux expansion without touching the lower
ones.
"""

from __future__ import annotations

import contextlib
import logging
import math
from dataclasses import dataclass

from flint import fmpq

from .branch import PuiseuxBranch, renormalize
from .contacts import DifferentialForm, LambdaData, lambda_set, witness_form
from .errors import (
    AffineLawViolated,
    ContractViolation,
    InvariantDrift,
    NonTermination,
    NotFlowEligible,
    ZeroBeta,
)
from .scalar import ONE, Scalar
from .series import BivariatePoly, TruncatedSeries, eval_on_curve, partials

log = logging.getLogger(__name__)

__all__ = [
    "VectorField",
    "FlowExpansion",
    "EliminationStep",
    "dual_field",
    "ode_taylor_coeffs",
    "flow_on_branch",
    "picard_flow_oracle",
    "eliminate_term",
    "first_order_deviation",
    "sign_fault",
]

_SIGN_FAULT = False


@contextlib.contextmanager
def sign_fault(enabled: bool = True):
    """Test-only: flip the sign of the ``dX_i/dy * Y1`` term in the recursion.

    Used to check that the oracle comparison detects a wrong recursion.
    """
    global _SIGN_FAULT
    previous = _SIGN_FAULT
    _SIGN_FAULT = enabled
    try:
        yield
    finally:
        _SIGN_FAULT = previous


@dataclass(frozen=True)
class VectorField:
    """The vector field ``X1 d/dx + Y1 d/dy``."""

    X1: BivariatePoly
    Y1: BivariatePoly

    def eligibility_violation(self) -> str | None:
        """Name of the first violated eligibility condition, or None."""
        if self.Y1.order() < 2:
            return "Y1 must lie in (x,y)^2"
        if self.X1.x_restriction_order() < 2:
            return "ord_x X1(x,0) must be at least 2"
        return None

    def is_eligible(self) -> bool:
        return self.eligibility_violation() is None

    def check_eligible(self) -> None:
        problem = self.eligibility_violation()
        if problem:
            raise NotFlowEligible(problem)

    def is_zero(self) -> bool:
        return self.X1.is_zero() and self.Y1.is_zero()


def dual_field(w: DifferentialForm) -> VectorField:
    """The field ``x' = B, y' = -A`` dual to ``A dx + B dy``."""
    E = VectorField(w.B, -w.A)
    E.check_eligible()
    return E


# ---------------------------------------------------------------------------
# the Taylor recursion
# ---------------------------------------------------------------------------


def _recursion_truncation(E: VectorField, n: int, m: int, N: int):
    """Pick weights, bound and safety cap for the recursion.

    When both ``X1`` and ``Y1`` raise the weighted order for weights
    ``(n, m)`` (``wt(X1) > n`` and ``wt(Y1) > m``) every step raises it by at
    least one, so truncating at weight ``N`` is exact and the recursion stops
    after at most ``N`` steps.  Otherwise the total degree bound
    ``D = ceil((N+1)/n) + 1`` is used, which is exact because ``X1`` and
    ``Y1`` vanish at the origin.
    """
    weights = (n, m)
    delta = min(E.X1.min_weight(weights) - n, E.Y1.min_weight(weights) - m)
    if delta >= 1:
        return weights, N, N + 1
    D = math.ceil((N + 1) / n) + 1
    return (1, 1), D, (D + 1) ** 2 + 1


def _next_coefficient(P: BivariatePoly, X1, Y1, bound) -> BivariatePoly:
    dx, dy = partials(P)
    first = dx.mul_truncated(X1, bound) if not dx.is_zero() else None
    second = dy.mul_truncated(Y1, bound) if not dy.is_zero() else None
    if second is not None and _SIGN_FAULT:
        second = -second
    result = BivariatePoly.zero(bound, X1.weights)
    for part in (first, second):
        if part is not None:
            result = result + part
    if result.bound is not None and result.bound < bound:
        raise ContractViolation(f"recursion lost exactness: bound {result.bound} < {bound}")
    return result.truncated(bound) if result.bound != bound else result


def ode_taylor_coeffs(E: VectorField, b: PuiseuxBranch, truncation: int | None = None):
    """``[(X_i(phi), Y_i(phi)) for i = 1, 2, ...]`` until the polynomials vanish.

    Every ``X_i(phi)`` is checked to have order greater than ``n``.
    """
    E.check_eligible()
    N = b.truncation if truncation is None else truncation
    n, m = b.n, b.m
    weights, bound, cap = _recursion_truncation(E, n, m, N)
    X1 = E.X1.truncated(bound, weights)
    Y1 = E.Y1.truncated(bound, weights)
    x, y = b.x.truncate(N), b.y.truncate(N)
    out = []
    Xi, Yi = X1, Y1
    i = 1
    while not (Xi.is_zero() and Yi.is_zero()):
        if i > cap:
            raise NonTermination(f"flow recursion did not terminate within {cap} steps")
        xi = eval_on_curve(Xi, x, y, truncation=N)
        yi = eval_on_curve(Yi, x, y, truncation=N)
        v = xi.valuation()
        if v is not None and v <= n:
            raise ContractViolation(f"ord_t X_{i}(phi) = {v} does not exceed n = {n}")
        out.append((xi, yi))
        Xi, Yi = (
            _next_coefficient(Xi, X1, Y1, bound),
            _next_coefficient(Yi, X1, Y1, bound),
        )
        i += 1
    while out and out[-1][0].is_zero() and out[-1][1].is_zero():
        out.pop()
    return out


@dataclass(frozen=True)
class FlowExpansion:
    """``x(t,s)`` and ``y(t,s)`` as polynomials in ``s`` with series coefficients.

    ``x_coeffs[i]`` is the coefficient of ``s**i``; index 0 is the initial
    branch.  Trailing zero coefficients are removed, so ``depth`` is the
    true s-degree.
    """

    x_coeffs: tuple[TruncatedSeries, ...]
    y_coeffs: tuple[TruncatedSeries, ...]
    truncation: int

    @property
    def depth(self) -> int:
        return max(len(self.x_coeffs), len(self.y_coeffs)) - 1

    def at(self, s) -> tuple[TruncatedSeries, TruncatedSeries]:
        """The slice ``(x(t, s), y(t, s))`` at a fixed time ``s``."""
        s = Scalar.coerce(s)
        return _horner(self.x_coeffs, s), _horner(self.y_coeffs, s)


def _horner(coeffs, s: Scalar) -> TruncatedSeries:
    acc = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        acc = acc * s + c if s else c
    return acc


def _trim(coeffs):
    coeffs = list(coeffs)
    while len(coeffs) > 1 and coeffs[-1].is_zero():
        coeffs.pop()
    return tuple(coeffs)


def flow_on_branch(E: VectorField, b: PuiseuxBranch, truncation: int | None = None) -> FlowExpansion:
    """Taylor expansion of the flow of ``E`` starting on ``b``."""
    N = b.truncation if truncation is None else truncation
    terms = ode_taylor_coeffs(E, b, N)
    xs = [b.x.truncate(N)]
    ys = [b.y.truncate(N)]
    factorial = fmpq(1)
    for i, (xi, yi) in enumerate(terms, start=1):
        factorial = factorial * i
        inv = Scalar(1 / factorial)
        xs.append(xi * inv)
        ys.append(yi * inv)
    return FlowExpansion(_trim(xs), _trim(ys), N)


def first_order_deviation(E: VectorField, b: PuiseuxBranch) -> TruncatedSeries:
    """``Y1(phi) - (y'/x') X1(phi)``: the normal component of ``E`` along the branch.

    For the field dual to a witness of contact ``j + n`` this has order
    exactly ``j``; it is the first-order (in ``s``) change of ``y`` once the
    parameter is adjusted to keep ``x = t**n``.
    """
    X = eval_on_curve(E.X1, b.x, b.y)
    Y = eval_on_curve(E.Y1, b.x, b.y)
    det = b.xdot * Y - b.ydot * X
    return det.shift(-(b.n - 1)) / b.n


# ---------------------------------------------------------------------------
# Picard iteration oracle
# ---------------------------------------------------------------------------


def _spoly_mul(a, b, N):
    """Product of polynomials in ``s`` with series coefficients, t-truncated at N."""
    out = [None] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai.is_zero():
            continue
        for k, bk in enumerate(b):
            if bk.is_zero():
                continue
            term = (ai * bk).truncate(N)
            out[i + k] = term if out[i + k] is None else out[i + k] + term
    zero = TruncatedSeries({}, N)
    return _trim([c if c is not None else zero for c in out])


def _spoly_eval(p: BivariatePoly, xs, ys, N):
    zero = TruncatedSeries({}, N)
    coeffs = p.coefficients
    if not coeffs:
        return (zero,)
    kmax = max(k for k, _ in coeffs)
    lmax = max(l for _, l in coeffs)
    one = (TruncatedSeries.constant(ONE, N),)
    xpow = [one]
    for _ in range(kmax):
        xpow.append(_spoly_mul(xpow[-1], xs, N))
    ypow = [one]
    for _ in range(lmax):
        ypow.append(_spoly_mul(ypow[-1], ys, N))
    total: list[TruncatedSeries] = [zero]
    for (k, l), c in coeffs.items():
        term = _spoly_mul(xpow[k], ypow[l], N)
        if len(term) > len(total):
            total.extend([zero] * (len(term) - len(total)))
        for i, t in enumerate(term):
            total[i] = total[i] + t * c
    return _trim(total)


def picard_flow_oracle(E: VectorField, b: PuiseuxBranch, truncation: int | None = None) -> FlowExpansion:
    """The flow expansion by Picard iteration in ``s``.

    Starting from the constant expansion, repeat
    ``x <- x0 + integral_0^s X1(x, y) ds`` (and likewise ``y``) on
    polynomials in ``s`` whose coefficients are series in ``t`` truncated at
    ``N``.  Each round fixes at least one more power of ``s``; the loop
    stops at the first fixpoint.
    """
    E.check_eligible()
    N = b.truncation if truncation is None else truncation
    x0, y0 = b.x.truncate(N), b.y.truncate(N)
    xs, ys = (x0,), (y0,)
    for _ in range(N + 2):
        X = _spoly_eval(E.X1, xs, ys, N)
        Y = _spoly_eval(E.Y1, xs, ys, N)
        new_x = _trim([x0] + [c / (i + 1) for i, c in enumerate(X)])
        new_y = _trim([y0] + [c / (i + 1) for i, c in enumerate(Y)])
        if new_x == xs and new_y == ys:
            return FlowExpansion(xs, ys, N)
        xs, ys = new_x, new_y
    raise NonTermination("Picard iteration did not reach a fixpoint")


# ---------------------------------------------------------------------------
# elimination of one term
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EliminationStep:
    """Audit record of removing the coefficient at ``t**j``.

    ``probes`` lists ``(s, c(s))`` where ``c(s)`` is the coefficient at
    ``t**j`` after flowing for time ``s`` and renormalizing.
    """

    j: int
    omega: DifferentialForm
    beta: Scalar
    s_j: Scalar
    before: PuiseuxBranch
    after: PuiseuxBranch
    probes: tuple[tuple[Scalar, Scalar], ...] = ()


_PROBE_TIMES = (Scalar(0), Scalar(1), Scalar(2), Scalar(-1))


def eliminate_term(
    b: PuiseuxBranch,
    j: int,
    lam_data: LambdaData | None = None,
    truncation: int | None = None,
) -> EliminationStep:
    """Remove the coefficient ``a_j`` by the flow dual to a witness form.

    The coefficient at ``t**j`` after time ``s`` is ``a_j + beta*s``; it is
    probed at ``s = 0, 1, 2, -1`` (the last two certify the affine law),
    then the flow is run for ``s_j = -a_j/beta``.  ``truncation`` lets the
    caller work below the branch truncation (it must stay above ``j``).
    """
    lam_data = lam_data or lambda_set(b)
    N = b.truncation if truncation is None else min(truncation, b.truncation)
    if N < j:
        raise ValueError(f"working truncation {N} is below the exponent {j}")
    work = b if N == b.truncation else b.truncated(N)
    omega = witness_form(b, j, lam_data)
    E = dual_field(omega)
    flow = flow_on_branch(E, work, N)
    n, m = b.n, b.m
    a_j = b.coefficient(j)

    def probe(s: Scalar) -> Scalar:
        xs, ys = flow.at(s)
        slice_ = renormalize(xs.truncate(j + n - m), ys.truncate(j))
        return slice_.coefficient(j)

    probes = tuple((s, probe(s)) for s in _PROBE_TIMES)
    c0, c1, c2, cm1 = (c for _, c in probes)
    if c0 != a_j:
        raise InvariantDrift(f"time-zero slice changed the coefficient at t^{j}")
    beta = c1 - c0
    if not beta:
        raise ZeroBeta(f"beta vanished at j={j} for witness {omega}")
    if c2 != a_j + 2 * beta or cm1 != a_j - beta:
        raise AffineLawViolated(
            f"coefficient at t^{j} is not affine in s: c(0)={c0}, c(1)={c1}, c(2)={c2}, c(-1)={cm1}"
        )
    s_j = -a_j / beta
    if s_j:
        xs, ys = flow.at(s_j)
        after = renormalize(xs, ys)
    else:
        after = work
    lower_before = [(e, c) for e, c in work.y_terms if e < j]
    lower_after = [(e, c) for e, c in after.y_terms if e < j]
    if lower_before != lower_after:
        raise InvariantDrift(f"eliminating t^{j} changed lower coefficients")
    if after.coefficient(j):
        raise AffineLawViolated(f"coefficient at t^{j} is {after.coefficient(j)} after the flow, expected 0")
    return EliminationStep(j, omega, beta, s_j, b, after, probes)
