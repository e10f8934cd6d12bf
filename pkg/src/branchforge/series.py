"""Truncated power series in t and truncated polynomials in (x, y) over Q(i).

Both types present coefficients as sparse maps to :class:`~branchforge.scalar.Scalar`
but store them internally as pairs of FLINT rational polynomials (real part,
imaginary part), which keeps the hot loops inside FLINT.

Truncation conventions
----------------------
A :class:`TruncatedSeries` with truncation ``N`` knows its coefficients of
``t**0 .. t**N``; everything above is *unknown*, not zero.  Results of
arithmetic carry the largest truncation that is guaranteed exact.

A :class:`BivariatePoly` keeps the monomials ``x**k * y**l`` with
``wx*k + wy*l <= bound`` for a weight vector ``(wx, wy)``.  The default
weights ``(1, 1)`` give the usual total-degree truncation; ``bound=None``
marks an exact polynomial.
"""

from __future__ import annotations

import contextlib
import math
from typing import Iterable, Mapping

from flint import ctx as flint_ctx, fmpq, fmpq_poly, fmpq_series

from .errors import (
    BadValuation,
    NonzeroConstantTerm,
    NotUnitOne,
    TruncationInsufficient,
    ZeroConstantTerm,
)
from .scalar import ONE, ZERO, Scalar

__all__ = [
    "TruncatedSeries",
    "BivariatePoly",
    "derivative",
    "partials",
    "compose",
    "compositional_inverse",
    "nth_root_of_unit_series",
    "reciprocal",
    "eval_on_curve",
]

_EMPTY = fmpq_poly([])


# ---------------------------------------------------------------------------
# complex polynomial helpers: a complex polynomial is a pair (re, im)
# ---------------------------------------------------------------------------


def _cmul_low(ar, ai, br, bi, length):
    """Product of two complex polynomials modulo ``t**length``."""
    if length <= 0:
        return _EMPTY, _EMPTY
    a_real = ai.is_zero()
    b_real = bi.is_zero()
    if a_real and b_real:
        return ar.mul_low(br, length), _EMPTY
    if a_real:
        return ar.mul_low(br, length), ar.mul_low(bi, length)
    if b_real:
        return ar.mul_low(br, length), ai.mul_low(br, length)
    k1 = br.mul_low(ar + ai, length)
    k2 = ar.mul_low(bi - br, length)
    k3 = ai.mul_low(br + bi, length)
    return k1 - k3, k1 + k2


def _cmul(ar, ai, br, bi):
    """Exact product of two complex polynomials."""
    a_real = ai.is_zero()
    b_real = bi.is_zero()
    if a_real and b_real:
        return ar * br, _EMPTY
    if a_real:
        return ar * br, ar * bi
    if b_real:
        return ar * br, ai * br
    k1 = br * (ar + ai)
    k2 = ar * (bi - br)
    k3 = ai * (br + bi)
    return k1 - k3, k1 + k2


def _cscale(re, im, c: Scalar):
    """Multiply a complex polynomial by a scalar."""
    if c.im == 0:
        if c.re == 1:
            return re, im
        return re * c.re, im * c.re
    if im.is_zero():
        return re * c.re, re * c.im
    return re * c.re - im * c.im, re * c.im + im * c.re


def _poly_valuation(re, im) -> int | None:
    """Index of the lowest nonzero coefficient, or None for zero."""
    if re.is_zero() and im.is_zero():
        return None
    k = 0
    while re[k] == 0 and im[k] == 0:
        k += 1
    return k


@contextlib.contextmanager
def _series_cap(length: int):
    """Raise FLINT's global series cap, which bounds inv/exp/log/reversion output."""
    old = flint_ctx.cap
    flint_ctx.cap = max(old, length)
    try:
        yield
    finally:
        flint_ctx.cap = old


def _to_series(poly, length):
    return fmpq_series(poly, prec=length)


def _from_series(series):
    return fmpq_poly(series.coeffs())


def _check_truncation(n: int) -> int:
    if not isinstance(n, int) or isinstance(n, bool):
        raise TypeError("truncation must be an integer")
    if n < -1:
        raise ValueError("truncation must be >= -1")
    return n


# ---------------------------------------------------------------------------
# TruncatedSeries
# ---------------------------------------------------------------------------


class TruncatedSeries:
    """A power series in ``t`` with coefficients in Q(i), known modulo ``t**(N+1)``.

    Construct from a mapping ``{exponent: coefficient}`` (coefficients may be
    anything :meth:`Scalar.coerce` accepts) and the truncation ``N``.
    Exponents above ``N`` are discarded.
    """

    __slots__ = ("_re", "_im", "truncation")

    def __init__(self, coefficients: Mapping[int, object] | None = None, truncation: int = 0):
        truncation = _check_truncation(truncation)
        re_coeffs: dict[int, fmpq] = {}
        im_coeffs: dict[int, fmpq] = {}
        for exp, value in (coefficients or {}).items():
            if not isinstance(exp, int) or exp < 0:
                raise ValueError(f"exponents must be non-negative integers, got {exp!r}")
            if exp > truncation:
                continue
            c = Scalar.coerce(value)
            if c.re != 0:
                re_coeffs[exp] = c.re
            if c.im != 0:
                im_coeffs[exp] = c.im
        self._re = _dense(re_coeffs)
        self._im = _dense(im_coeffs)
        self.truncation = truncation

    @classmethod
    def _wrap(cls, re, im, truncation: int) -> "TruncatedSeries":
        obj = object.__new__(cls)
        length = truncation + 1
        if re.length() > length:
            re = re.truncate(max(length, 0))
        if im.length() > length:
            im = im.truncate(max(length, 0))
        obj._re = re
        obj._im = im
        obj.truncation = truncation
        return obj

    @classmethod
    def from_polys(cls, re, im=None, truncation: int = 0) -> "TruncatedSeries":
        """Build from FLINT polynomials for the real and imaginary parts."""
        return cls._wrap(fmpq_poly(re), fmpq_poly(im) if im is not None else _EMPTY, truncation)

    @classmethod
    def monomial(cls, exponent: int, coefficient=ONE, truncation: int = 0) -> "TruncatedSeries":
        return cls({exponent: coefficient}, truncation)

    @classmethod
    def constant(cls, value, truncation: int) -> "TruncatedSeries":
        return cls({0: value}, truncation)

    # -- views --------------------------------------------------------------

    @property
    def polys(self):
        """The pair of FLINT polynomials ``(re, im)`` (read-only use)."""
        return self._re, self._im

    @property
    def coefficients(self) -> dict[int, Scalar]:
        """Sparse map of nonzero coefficients."""
        out = {}
        re, im = self._re, self._im
        for k in range(max(re.length(), im.length())):
            a, b = re[k], im[k]
            if a != 0 or b != 0:
                out[k] = Scalar._make(a, b)
        return out

    def coefficient(self, k: int) -> Scalar:
        """Coefficient of ``t**k``; raises if ``k`` is above the truncation."""
        if k > self.truncation:
            raise TruncationInsufficient(f"coefficient of t^{k} is above truncation {self.truncation}")
        if k < 0:
            return ZERO
        return Scalar._make(self._re[k], self._im[k])

    __getitem__ = coefficient

    def valuation(self) -> int | None:
        """Lowest exponent with a nonzero coefficient, None if zero within truncation."""
        return _poly_valuation(self._re, self._im)

    def valuation_bound(self) -> int:
        """The valuation, or ``N + 1`` (a lower bound) for a series known to be zero."""
        v = self.valuation()
        return self.truncation + 1 if v is None else v

    def leading_coefficient(self) -> Scalar:
        v = self.valuation()
        if v is None:
            return ZERO
        return Scalar._make(self._re[v], self._im[v])

    def is_zero(self) -> bool:
        return self._re.is_zero() and self._im.is_zero()

    def is_real(self) -> bool:
        return self._im.is_zero()

    def degree(self) -> int:
        """Largest exponent with a nonzero coefficient (-1 for zero)."""
        return max(self._re.degree(), self._im.degree())

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return (
            self.truncation == other.truncation
            and self._re == other._re
            and self._im == other._im
        )

    def __hash__(self) -> int:
        return hash((self.truncation, str(self._re), str(self._im)))

    def agrees_with(self, other: "TruncatedSeries", upto: int | None = None) -> bool:
        """True when both series have the same coefficients up to ``t**upto``.

        ``upto`` defaults to the smaller truncation.
        """
        if upto is None:
            upto = min(self.truncation, other.truncation)
        if upto > min(self.truncation, other.truncation):
            raise TruncationInsufficient("comparison above the known part")
        length = upto + 1
        return (
            self._re.truncate(length) == other._re.truncate(length)
            and self._im.truncate(length) == other._im.truncate(length)
        )

    def __repr__(self) -> str:
        terms = " + ".join(f"({c})*t^{k}" for k, c in sorted(self.coefficients.items()))
        return f"TruncatedSeries({terms or '0'} + O(t^{self.truncation + 1}))"

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        other = _series_operand(other, self.truncation)
        if other is None:
            return NotImplemented
        n = min(self.truncation, other.truncation)
        return TruncatedSeries._wrap(self._re + other._re, self._im + other._im, n)

    __radd__ = __add__

    def __sub__(self, other):
        other = _series_operand(other, self.truncation)
        if other is None:
            return NotImplemented
        n = min(self.truncation, other.truncation)
        return TruncatedSeries._wrap(self._re - other._re, self._im - other._im, n)

    def __rsub__(self, other):
        other = _series_operand(other, self.truncation)
        if other is None:
            return NotImplemented
        return other - self

    def __neg__(self):
        return TruncatedSeries._wrap(-self._re, -self._im, self.truncation)

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            va = self.valuation_bound()
            vb = other.valuation_bound()
            n = min(self.truncation + vb, other.truncation + va)
            re, im = _cmul_low(self._re, self._im, other._re, other._im, n + 1)
            return TruncatedSeries._wrap(re, im, n)
        c = _scalar_operand(other)
        if c is None:
            return NotImplemented
        re, im = _cscale(self._re, self._im, c)
        return TruncatedSeries._wrap(re, im, self.truncation)

    __rmul__ = __mul__

    def __truediv__(self, other):
        c = _scalar_operand(other)
        if c is None:
            return NotImplemented
        return self * c.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        if k == 0:
            return TruncatedSeries.constant(ONE, self.truncation)
        result = None
        base = self
        while k:
            if k & 1:
                result = base if result is None else result * base
            k >>= 1
            if k:
                base = base * base
        return result

    # -- structural operations ----------------------------------------------

    def truncate(self, n: int) -> "TruncatedSeries":
        """Forget coefficients above ``t**n`` (``n`` must not exceed the truncation)."""
        if n > self.truncation:
            raise TruncationInsufficient(f"cannot raise truncation {self.truncation} to {n}")
        return TruncatedSeries._wrap(self._re, self._im, n)

    def shift(self, k: int) -> "TruncatedSeries":
        """Multiply by ``t**k``; negative ``k`` divides (the valuation must allow it)."""
        if k >= 0:
            return TruncatedSeries._wrap(self._re.left_shift(k), self._im.left_shift(k), self.truncation + k)
        if self.valuation_bound() < -k:
            raise BadValuation(f"cannot divide by t^{-k}: valuation is {self.valuation()}")
        return TruncatedSeries._wrap(self._re.right_shift(-k), self._im.right_shift(-k), self.truncation + k)

    def derivative(self) -> "TruncatedSeries":
        return TruncatedSeries._wrap(self._re.derivative(), self._im.derivative(), self.truncation - 1)

    def scale_variable(self, c) -> "TruncatedSeries":
        """Return ``s(c*t)``."""
        c = Scalar.coerce(c)
        if c == ONE:
            return self
        coeffs = {}
        power = ONE
        for k in range(self.degree() + 1):
            a = Scalar._make(self._re[k], self._im[k])
            if a:
                coeffs[k] = a * power
            power = power * c
        return TruncatedSeries(coeffs, self.truncation)

    def conjugate(self) -> "TruncatedSeries":
        return TruncatedSeries._wrap(self._re, -self._im, self.truncation)

    def evaluate_polynomial(self, s) -> Scalar:
        """Evaluate the known part at ``t = s`` (used for polynomials in s)."""
        s = Scalar.coerce(s)
        acc = ZERO
        for k in range(self.degree(), -1, -1):
            acc = acc * s + Scalar._make(self._re[k], self._im[k])
        return acc


def _dense(coeffs: dict[int, fmpq]):
    if not coeffs:
        return _EMPTY
    top = max(coeffs)
    return fmpq_poly([coeffs.get(k, 0) for k in range(top + 1)])


def _scalar_operand(value) -> Scalar | None:
    if isinstance(value, Scalar):
        return value
    if isinstance(value, (int, fmpq)):
        return Scalar(value)
    return None


def _series_operand(value, truncation):
    if isinstance(value, TruncatedSeries):
        return value
    c = _scalar_operand(value)
    if c is None:
        return None
    return TruncatedSeries.constant(c, truncation)


# ---------------------------------------------------------------------------
# univariate operations
# ---------------------------------------------------------------------------


def derivative(s: TruncatedSeries) -> TruncatedSeries:
    """Formal derivative d/dt; the truncation drops by one."""
    return s.derivative()


def reciprocal(u: TruncatedSeries) -> TruncatedSeries:
    """The series ``v`` with ``u*v = 1`` modulo ``t**(N+1)``."""
    if u.truncation < 0 or u.coefficient(0).is_zero():
        raise ZeroConstantTerm("reciprocal needs a nonzero constant term")
    length = u.truncation + 1
    re, im = u.polys
    if im.is_zero():
        with _series_cap(length):
            inv = _from_series(1 / _to_series(re, length))
        return TruncatedSeries._wrap(inv, _EMPTY, u.truncation)
    # 1/(a + ib) = (a - ib) / (a^2 + b^2); the norm is a real unit.
    norm = re.mul_low(re, length) + im.mul_low(im, length)
    with _series_cap(length):
        inv_norm = _from_series(1 / _to_series(norm, length))
    return TruncatedSeries._wrap(re.mul_low(inv_norm, length), -im.mul_low(inv_norm, length), u.truncation)


def _log_unit(u: TruncatedSeries):
    """Complex logarithm of a unit with constant term 1, as (re, im) FLINT series."""
    length = u.truncation + 1
    du = u.derivative()
    q = du * reciprocal(u)
    re, im = q.polys
    return re.integral().truncate(length), im.integral().truncate(length)


def _exp_complex(lre, lim, truncation, factor=1):
    """exp(factor*(lre + i*lim)) for series with zero constant term."""
    length = truncation + 1
    with _series_cap(length):
        lre = _to_series(lre, length) * factor
        lim = _to_series(lim, length)
        e = lre.exp()
        if all(c == 0 for c in lim.coeffs()):
            return TruncatedSeries._wrap(_from_series(e).truncate(length), _EMPTY, truncation)
        lim = lim * factor
        cos_part = _from_series(e * lim.cos())
        sin_part = _from_series(e * lim.sin())
    return TruncatedSeries._wrap(cos_part.truncate(length), sin_part.truncate(length), truncation)


def nth_root_of_unit_series(u: TruncatedSeries, n: int) -> TruncatedSeries:
    """Principal n-th root of a series with constant term 1."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    if u.truncation < 0 or u.coefficient(0) != ONE:
        raise NotUnitOne("the n-th root needs constant term exactly 1")
    if n == 1 or u.truncation == 0:
        return u
    lre, lim = _log_unit(u)
    return _exp_complex(lre, lim, u.truncation, fmpq(1, n))


def power_of_unit_series(u: TruncatedSeries, exponent) -> TruncatedSeries:
    """``u**exponent`` for a rational exponent and a unit with constant term 1."""
    exponent = fmpq(exponent) if not isinstance(exponent, fmpq) else exponent
    if u.truncation < 0 or u.coefficient(0) != ONE:
        raise NotUnitOne("rational powers need constant term exactly 1")
    if u.truncation == 0:
        return u
    lre, lim = _log_unit(u)
    return _exp_complex(lre, lim, u.truncation, exponent)


def _composed_truncation(outer: TruncatedSeries, inner: TruncatedSeries) -> int:
    v = inner.valuation_bound()
    vo = outer.valuation_bound()
    return min((outer.truncation + 1) * v - 1, inner.truncation + max(vo - 1, 0) * v)


def compose(outer: TruncatedSeries, inner: TruncatedSeries) -> TruncatedSeries:
    """``outer(inner(t))`` for ``inner`` with zero constant term.

    The result truncation is the largest one guaranteed by the operands:
    with ``v = ord(inner)`` and ``vo = ord(outer)`` it is
    ``min((No+1)*v - 1, Ni + max(vo-1, 0)*v)``.
    """
    if inner.truncation >= 0 and not inner.coefficient(0).is_zero():
        raise NonzeroConstantTerm("inner series must have zero constant term")
    n_res = _composed_truncation(outer, inner)
    v = inner.valuation_bound()
    if v == 1 and inner.degree() > 1:
        return _compose_taylor(outer, inner, n_res)
    return _compose_horner(outer, inner, n_res, v)


def _compose_horner(outer, inner, n_res, v):
    ore, oim = outer.polys
    top = min(max(ore.degree(), oim.degree()), n_res // v if v > 0 else 0)
    if top < 0:
        return TruncatedSeries._wrap(_EMPTY, _EMPTY, n_res)
    ire, iim = inner.polys
    acc_re = fmpq_poly([ore[top]])
    acc_im = fmpq_poly([oim[top]])
    for k in range(top - 1, -1, -1):
        length = n_res + 1 - k * v
        acc_re, acc_im = _cmul_low(acc_re, acc_im, ire, iim, length)
        acc_re = acc_re + ore[k]
        acc_im = acc_im + oim[k]
    return TruncatedSeries._wrap(acc_re, acc_im, n_res)


def _compose_taylor(outer, inner, n_res):
    """Composition with an inner series of valuation one.

    Writes ``inner = c*t + delta`` and expands ``f(t + delta/c)`` with
    ``f(t) = outer(c*t)`` by Taylor's formula; the number of terms is
    about ``n_res / ord(delta)``.
    """
    c = inner.coefficient(1)
    f = outer.scale_variable(c)
    lead = TruncatedSeries._wrap(fmpq_poly([0, 1]), _EMPTY, inner.truncation)
    delta = (inner / c) - lead if c != ONE else inner - lead
    de = delta.valuation()
    length = n_res + 1
    fre, fim = f.polys
    res_re, res_im = fre.truncate(length), fim.truncate(length)
    if de is None:
        return TruncatedSeries._wrap(res_re, res_im, n_res)
    dre, dim = delta.polys
    pre, pim = dre, dim
    vo = f.valuation_bound()
    k = 1
    dk_re, dk_im = fre, fim
    while True:
        if k * de + max(vo - k, 0) > n_res:
            break
        dk_re = dk_re.derivative() / k
        dk_im = dk_im.derivative() / k
        if dk_re.is_zero() and dk_im.is_zero():
            break
        if k > 1:
            pre, pim = _cmul_low(pre, pim, dre, dim, length)
            if pre.is_zero() and pim.is_zero():
                break
        tre, tim = _cmul_low(dk_re, dk_im, pre, pim, length)
        res_re = res_re + tre
        res_im = res_im + tim
        k += 1
    return TruncatedSeries._wrap(res_re, res_im, n_res)


def compositional_inverse(g: TruncatedSeries) -> TruncatedSeries:
    """The series ``h`` with ``g(h(t)) = h(g(t)) = t`` modulo ``t**(N+1)``."""
    if g.valuation() != 1:
        raise BadValuation(f"compositional inverse needs valuation 1, got {g.valuation()}")
    n = g.truncation
    c = g.coefficient(1)
    if g.is_real():
        re, _ = g.polys
        with _series_cap(n + 1):
            inv = _from_series(_to_series(re, n + 1).reversion())
        return TruncatedSeries._wrap(inv, _EMPTY, n)
    # Newton iteration h <- h - (g(h) - t) / g'(h), doubling the precision.
    h = TruncatedSeries({1: c.inverse()}, min(n, 1))
    dg = g.derivative()
    prec = 1
    while prec < n:
        prec = min(2 * prec, n)
        h = TruncatedSeries._wrap(*h.polys, prec)
        gt = g.truncate(prec)
        residual = compose(gt, h) - TruncatedSeries.monomial(1, ONE, prec)
        slope = compose(dg.truncate(prec - 1), h)
        correction = residual.shift(-1) * reciprocal(slope)
        h = h - correction.shift(1)
    return TruncatedSeries._wrap(*h.polys, n)


# ---------------------------------------------------------------------------
# BivariatePoly
# ---------------------------------------------------------------------------


def _row_limit(bound, weights, l):
    """Largest x-degree allowed in row ``l`` (None for exact, -1 if none)."""
    if bound is None:
        return None
    wx, wy = weights
    rest = bound - wy * l
    if rest < 0:
        return -1
    return rest // wx


class BivariatePoly:
    """A polynomial in ``x`` and ``y`` over Q(i), optionally truncated by weight.

    ``coefficients`` maps ``(k, l)`` to the coefficient of ``x**k * y**l``.
    With ``bound=None`` the polynomial is exact; otherwise only monomials of
    weight ``wx*k + wy*l <= bound`` are known.
    """

    __slots__ = ("_rows", "bound", "weights")

    def __init__(
        self,
        coefficients: Mapping[tuple[int, int], object] | None = None,
        bound: int | None = None,
        weights: tuple[int, int] = (1, 1),
    ):
        self.bound = bound
        self.weights = tuple(weights)
        rows: dict[int, tuple[dict, dict]] = {}
        for (k, l), value in (coefficients or {}).items():
            if k < 0 or l < 0:
                raise ValueError(f"negative exponent in monomial {(k, l)}")
            if bound is not None and self.weights[0] * k + self.weights[1] * l > bound:
                continue
            c = Scalar.coerce(value)
            if not c:
                continue
            re_row, im_row = rows.setdefault(l, ({}, {}))
            if c.re != 0:
                re_row[k] = c.re
            if c.im != 0:
                im_row[k] = c.im
        self._rows = {l: (_dense(r), _dense(i)) for l, (r, i) in rows.items()}

    @classmethod
    def _from_rows(cls, rows, bound, weights) -> "BivariatePoly":
        obj = object.__new__(cls)
        obj.bound = bound
        obj.weights = tuple(weights)
        clean = {}
        for l, (re, im) in rows.items():
            limit = _row_limit(bound, weights, l)
            if limit is not None:
                if limit < 0:
                    continue
                if re.length() > limit + 1:
                    re = re.truncate(limit + 1)
                if im.length() > limit + 1:
                    im = im.truncate(limit + 1)
            if re.is_zero() and im.is_zero():
                continue
            clean[l] = (re, im)
        obj._rows = clean
        return obj

    @classmethod
    def monomial(cls, k: int, l: int, coefficient=ONE, bound=None, weights=(1, 1)) -> "BivariatePoly":
        return cls({(k, l): coefficient}, bound, weights)

    @classmethod
    def zero(cls, bound=None, weights=(1, 1)) -> "BivariatePoly":
        return cls({}, bound, weights)

    # -- views --------------------------------------------------------------

    @property
    def rows(self):
        """Map ``l -> (re, im)`` of FLINT polynomials in x (read-only use)."""
        return self._rows

    @property
    def coefficients(self) -> dict[tuple[int, int], Scalar]:
        out = {}
        for l, (re, im) in self._rows.items():
            for k in range(max(re.length(), im.length())):
                a, b = re[k], im[k]
                if a != 0 or b != 0:
                    out[(k, l)] = Scalar._make(a, b)
        return out

    def coefficient(self, k: int, l: int) -> Scalar:
        row = self._rows.get(l)
        if row is None:
            return ZERO
        return Scalar._make(row[0][k], row[1][k])

    def is_zero(self) -> bool:
        return not self._rows

    def __len__(self) -> int:
        return len(self.coefficients)

    def monomials(self) -> list[tuple[int, int]]:
        return sorted(self.coefficients)

    def min_weight(self, weights: tuple[int, int] | None = None) -> float:
        """Minimum of ``wx*k + wy*l`` over the support (inf for zero)."""
        wx, wy = weights or self.weights
        best = math.inf
        for l, (re, im) in self._rows.items():
            v = _poly_valuation(re, im)
            best = min(best, wx * v + wy * l)
        return best

    def order(self) -> float:
        """Total degree of the lowest-degree monomial (inf for zero)."""
        return self.min_weight((1, 1))

    def total_degree(self) -> int:
        return max((max(re.degree(), im.degree()) + l for l, (re, im) in self._rows.items()), default=-1)

    def y_degree(self) -> int:
        return max(self._rows, default=-1)

    def x_restriction_order(self) -> float:
        """``ord_x p(x, 0)`` (inf when the restriction vanishes)."""
        row = self._rows.get(0)
        if row is None:
            return math.inf
        return _poly_valuation(*row)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BivariatePoly):
            return NotImplemented
        if self.bound != other.bound:
            return False
        if self.bound is not None and self.weights != other.weights:
            return False
        return self._rows == other._rows

    def __hash__(self) -> int:
        return hash(tuple(sorted(self.coefficients.items())))

    def __repr__(self) -> str:
        parts = [f"({c})*x^{k}*y^{l}" for (k, l), c in sorted(self.coefficients.items())]
        suffix = "" if self.bound is None else f", bound={self.bound}, weights={self.weights}"
        return f"BivariatePoly({' + '.join(parts) or '0'}{suffix})"

    # -- arithmetic ---------------------------------------------------------

    def _common(self, other: "BivariatePoly"):
        if self.bound is None:
            return other.weights if other.bound is not None else self.weights
        if other.bound is not None and other.weights != self.weights:
            raise ValueError("cannot combine polynomials truncated with different weights")
        return self.weights

    def __add__(self, other):
        other = _poly_operand(other)
        if other is None:
            return NotImplemented
        weights = self._common(other)
        bound = _min_bound(self.bound, other.bound)
        rows = dict(self._rows)
        for l, (re, im) in other._rows.items():
            if l in rows:
                a, b = rows[l]
                rows[l] = (a + re, b + im)
            else:
                rows[l] = (re, im)
        return BivariatePoly._from_rows(rows, bound, weights)

    __radd__ = __add__

    def __neg__(self):
        return BivariatePoly._from_rows({l: (-re, -im) for l, (re, im) in self._rows.items()}, self.bound, self.weights)

    def __sub__(self, other):
        other = _poly_operand(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _poly_operand(other)
        if other is None:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        if isinstance(other, BivariatePoly):
            return self._mul_poly(other)
        c = _scalar_operand(other)
        if c is None:
            return NotImplemented
        rows = {l: _cscale(re, im, c) for l, (re, im) in self._rows.items()}
        return BivariatePoly._from_rows(rows, self.bound, self.weights)

    __rmul__ = __mul__

    def _mul_poly(self, other: "BivariatePoly", bound_cap: int | None = None) -> "BivariatePoly":
        weights = self._common(other)
        if self.bound is None and other.bound is None:
            bound = None
        else:
            candidates = []
            if self.bound is not None:
                candidates.append(self.bound + other.min_weight(weights))
            if other.bound is not None:
                candidates.append(other.bound + self.min_weight(weights))
            bound = min(candidates)
            if bound == math.inf:
                bound = min(b for b in (self.bound, other.bound) if b is not None)
        if bound_cap is not None:
            bound = bound_cap if bound is None else min(bound, bound_cap)
        rows: dict[int, tuple] = {}
        for l1, (ar, ai) in self._rows.items():
            for l2, (br, bi) in other._rows.items():
                l = l1 + l2
                limit = _row_limit(bound, weights, l)
                if limit is None:
                    re, im = _cmul(ar, ai, br, bi)
                elif limit < 0:
                    continue
                else:
                    re, im = _cmul_low(ar, ai, br, bi, limit + 1)
                if l in rows:
                    pr, pi = rows[l]
                    rows[l] = (pr + re, pi + im)
                else:
                    rows[l] = (re, im)
        return BivariatePoly._from_rows(rows, bound, weights)

    def mul_truncated(self, other: "BivariatePoly", bound: int) -> "BivariatePoly":
        """Product keeping only monomials of weight at most ``bound``."""
        return self._mul_poly(other, bound_cap=bound)

    def truncated(self, bound: int | None, weights: tuple[int, int] | None = None) -> "BivariatePoly":
        """Drop monomials of weight above ``bound`` (changing weights if given)."""
        weights = tuple(weights) if weights is not None else self.weights
        if self.bound is not None:
            if weights != self.weights:
                raise ValueError("cannot re-weight a truncated polynomial")
            if bound is None or bound > self.bound:
                raise TruncationInsufficient("cannot raise the bound of a truncated polynomial")
        return BivariatePoly._from_rows(dict(self._rows), bound, weights)

    def shift(self, k: int, l: int = 0) -> "BivariatePoly":
        """Multiply by ``x**k * y**l``."""
        rows = {row + l: (re.left_shift(k), im.left_shift(k)) for row, (re, im) in self._rows.items()}
        bound = None if self.bound is None else self.bound + self.weights[0] * k + self.weights[1] * l
        return BivariatePoly._from_rows(rows, bound, self.weights)

    def partial_x(self) -> "BivariatePoly":
        rows = {l: (re.derivative(), im.derivative()) for l, (re, im) in self._rows.items()}
        bound = None if self.bound is None else self.bound - self.weights[0]
        return BivariatePoly._from_rows(rows, bound, self.weights)

    def partial_y(self) -> "BivariatePoly":
        rows = {l - 1: (re * l, im * l) for l, (re, im) in self._rows.items() if l > 0}
        bound = None if self.bound is None else self.bound - self.weights[1]
        return BivariatePoly._from_rows(rows, bound, self.weights)


def _min_bound(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _poly_operand(value):
    if isinstance(value, BivariatePoly):
        return value
    c = _scalar_operand(value)
    if c is None:
        return None
    return BivariatePoly({(0, 0): c})


def partials(p: BivariatePoly) -> tuple[BivariatePoly, BivariatePoly]:
    """The pair ``(dp/dx, dp/dy)``."""
    return p.partial_x(), p.partial_y()


def _substitute_monomial_x(re, im, n: int, c: Scalar, length: int):
    """Row polynomial P(x) evaluated at x = c*t**n, modulo t**length."""
    if re.is_zero() and im.is_zero():
        return _EMPTY, _EMPTY
    top = min(max(re.degree(), im.degree()), (length - 1) // n)
    if c == ONE:
        rr = [0] * (top * n + 1)
        ii = [0] * (top * n + 1)
        for k in range(top + 1):
            rr[k * n] = re[k]
            ii[k * n] = im[k]
        return fmpq_poly(rr), fmpq_poly(ii)
    out = {}
    power = ONE
    for k in range(top + 1):
        a = Scalar._make(re[k], im[k])
        if a:
            out[k * n] = a * power
        power = power * c
    s = TruncatedSeries(out, top * n)
    return s.polys


def eval_on_curve(
    p: BivariatePoly,
    x: TruncatedSeries,
    y: TruncatedSeries,
    truncation: int | None = None,
) -> TruncatedSeries:
    """``p(x(t), y(t))`` with a certified truncation.

    The result is exact up to the smaller of the curve truncations and the
    order below which every monomial dropped from ``p`` is guaranteed to
    vanish.  Passing ``truncation`` requests at least that accuracy and
    raises :class:`TruncationInsufficient` otherwise; the result is then
    truncated to exactly that value.
    """
    vx = x.valuation_bound()
    vy = y.valuation_bound()
    if (x.truncation >= 0 and not x.coefficient(0).is_zero()) or (
        y.truncation >= 0 and not y.coefficient(0).is_zero()
    ):
        raise NonzeroConstantTerm("the curve must pass through the origin")
    n_res = min(x.truncation, y.truncation)
    if p.bound is not None:
        wx, wy = p.weights
        mu = min(fmpq(vx, wx), fmpq(vy, wy))
        dropped = mu * (p.bound + 1)
        cap = int(dropped.p // dropped.q) + (0 if dropped.q == 1 else 1) - 1
        n_res = min(n_res, cap)
    if truncation is not None:
        if truncation > n_res:
            raise TruncationInsufficient(
                f"evaluation is only certified to t^{n_res}, requested t^{truncation}"
            )
        n_res = truncation
    length = n_res + 1
    if p.is_zero() or length <= 0:
        return TruncatedSeries._wrap(_EMPTY, _EMPTY, n_res)
    xs = x.coefficients
    monomial_x = len(xs) == 1
    if monomial_x:
        ((xn, xc),) = xs.items()
    xre, xim = x.polys
    yre, yim = y.polys

    def row_value(l):
        row = p.rows.get(l)
        if row is None:
            return _EMPTY, _EMPTY
        rre, rim = row
        if monomial_x:
            return _substitute_monomial_x(rre, rim, xn, xc, length)
        outer = TruncatedSeries._wrap(rre, rim, max(rre.degree(), rim.degree(), 0))
        res = _compose_horner(outer, TruncatedSeries._wrap(xre, xim, n_res), n_res, max(vx, 1))
        return res.polys

    top = p.y_degree()
    acc_re, acc_im = row_value(top)
    for l in range(top - 1, -1, -1):
        prec = length - l * vy
        if prec <= 0:
            acc_re, acc_im = _EMPTY, _EMPTY
            continue
        acc_re, acc_im = _cmul_low(acc_re, acc_im, yre, yim, prec)
        rre, rim = row_value(l)
        acc_re = acc_re + rre
        acc_im = acc_im + rim
    return TruncatedSeries._wrap(acc_re, acc_im, n_res)


def poly_from_terms(terms: Iterable[tuple[int, int, object]], bound=None, weights=(1, 1)) -> BivariatePoly:
    """Build a polynomial from ``(k, l, coefficient)`` triples, adding repeats."""
    coeffs: dict[tuple[int, int], Scalar] = {}
    for k, l, c in terms:
        coeffs[(k, l)] = coeffs.get((k, l), ZERO) + Scalar.coerce(c)
    return BivariatePoly(coeffs, bound, weights)
