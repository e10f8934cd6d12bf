"""Staircase (echelon) computations of attainable orders along a branch.

Two independent algorithms live here.

``module_echelon``
    The fast path.  Along the branch ``x = t**n``, so multiplying a
    function or form by ``x`` shifts its pullback by ``n``.  The pullbacks
    of all polynomial functions (or 1-forms) therefore form a C[x]-module
    generated by the pullbacks of ``y**l`` (or of ``y**l dx`` and
    ``y**l dy``).  Keeping one reduced element per residue class of the
    order modulo ``n`` gives a standard basis: the attainable orders are
    exactly ``{e_rho + k*n}``, an Apery-set description.  Each basis
    element carries the polynomial combination that produced it, which
    yields explicit witnesses.

``echelon_orders``
    The oracle.  Plain Gaussian elimination over the coefficient vectors
    of *all* monomial pullbacks below a window, read off from the pivot
    columns.  It is quadratic in the number of monomials and only used to
    cross-check the fast path.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence


from .scalar import ONE, Scalar
from .series import BivariatePoly, TruncatedSeries, _cscale

__all__ = [
    "BasisElement",
    "module_echelon",
    "attained_orders",
    "echelon_orders",
    "function_generators",
    "form_generators",
    "eligible_form_generators",
    "monomial_function_pullbacks",
    "monomial_form_pullbacks",
]


@dataclass(frozen=True)
class BasisElement:
    """One standard-basis element: its order, pullback and producing combination."""

    order: int
    series: TruncatedSeries
    tag: tuple[BivariatePoly, ...] | None


def _lead(re, im, window):
    """(valuation, coefficient) of a complex polynomial below ``window``."""
    if re.is_zero() and im.is_zero():
        return None, None
    k = 0
    top = max(re.length(), im.length())
    while k < top and re[k] == 0 and im[k] == 0:
        k += 1
    if k >= min(top, window):
        return None, None
    return k, Scalar._make(re[k], im[k])


def _combine_tag(tag, other, coefficient, k):
    """``tag - coefficient * x**k * other`` componentwise."""
    return tuple(a - (b.shift(k) * coefficient) for a, b in zip(tag, other))


def module_echelon(
    generators: Iterable[tuple[TruncatedSeries, tuple[BivariatePoly, ...] | None]],
    n: int,
    window: int,
) -> dict[int, BasisElement]:
    """Standard basis of the C[x]-module spanned by ``generators`` modulo ``t**window``.

    ``generators`` yields ``(pullback, tag)`` pairs where the tag is a tuple of
    polynomials (or None when no witness tracking is wanted).  Returns a map
    from residue class modulo ``n`` to the basis element of least order in
    that class.  Generators are processed in the given order; the result is
    deterministic for a deterministic input order.
    """
    basis: dict[int, tuple[int, object, object, Scalar, object]] = {}
    for series, tag in generators:
        re, im = series.polys
        re = re.truncate(window)
        im = im.truncate(window)
        while True:
            e, lead = _lead(re, im, window)
            if e is None:
                break
            rho = e % n
            if rho not in basis:
                basis[rho] = (e, re, im, lead, tag)
                break
            e0, bre, bim, blead, btag = basis[rho]
            if e < e0:
                basis[rho] = (e, re, im, lead, tag)
                e, re, im, lead, tag = e0, bre, bim, blead, btag
                e0, bre, bim, blead, btag = basis[rho]
            shift = e - e0
            c = lead / blead
            sre, sim = _cscale(bre.left_shift(shift), bim.left_shift(shift), c)
            re = (re - sre).truncate(window)
            im = (im - sim).truncate(window)
            if tag is not None:
                tag = _combine_tag(tag, btag, c, shift // n)
    return {
        rho: BasisElement(e, TruncatedSeries._wrap(re, im, window - 1), tag)
        for rho, (e, re, im, _, tag) in sorted(basis.items())
    }


def attained_orders(basis: dict[int, BasisElement], n: int, window: int) -> list[int]:
    """All orders ``e_rho + k*n`` below ``window``."""
    out = set()
    for element in basis.values():
        out.update(range(element.order, window, n))
    return sorted(out)


# ---------------------------------------------------------------------------
# generators along a branch (x = t**n, y = y(t))
# ---------------------------------------------------------------------------


def _y_powers(y: TruncatedSeries, window: int):
    """Yield (l, y**l) while the order of y**l stays below ``window``."""
    m = y.valuation()
    power = TruncatedSeries.constant(ONE, y.truncation)
    l = 0
    while l * m < window:
        yield l, power
        power = power * y
        l += 1


def function_generators(y: TruncatedSeries, window: int, track: bool = True):
    """Module generators ``y**l`` for the pullbacks of functions."""
    for l, power in _y_powers(y, window):
        tag = (BivariatePoly.monomial(0, l),) if track else None
        yield power, tag


def form_generators(n: int, y: TruncatedSeries, window: int, track: bool = True):
    """Module generators ``y**l dx`` and ``y**l dy`` for pullbacks of 1-forms.

    The pullback of ``A dx + B dy`` is the series ``A(phi)*n*t**(n-1) + B(phi)*y'``
    (one less than the contact order).
    """
    dx = TruncatedSeries.monomial(n - 1, n, y.truncation)
    dy = y.derivative()
    zero = BivariatePoly.zero()
    for l, power in _y_powers(y, window):
        mono = BivariatePoly.monomial(0, l)
        yield power * dx, ((mono, zero) if track else None)
        yield power * dy, ((zero, mono) if track else None)


def eligible_form_generators(n: int, y: TruncatedSeries, window: int, track: bool = True):
    """Generators of the forms ``A dx + B dy`` with ``A`` in (x,y)^2 and ``B`` in (x^2, y).

    These are exactly the forms whose dual vector field ``(B, -A)`` is
    flow-eligible.  As a C[x]-module they are spanned by ``x^2 dx``,
    ``x y dx``, ``y^l dx`` (l >= 2), ``x^2 dy`` and ``y^l dy`` (l >= 1).
    """
    trunc = y.truncation
    dx = TruncatedSeries.monomial(n - 1, n, trunc)
    dy = y.derivative()
    x1 = TruncatedSeries.monomial(n, ONE, trunc)
    x2 = TruncatedSeries.monomial(2 * n, ONE, trunc)
    zero = BivariatePoly.zero()

    def tag(a, b):
        return (a, b) if track else None

    mono = BivariatePoly.monomial
    yield x2 * dx, tag(mono(2, 0), zero)
    yield x2 * dy, tag(zero, mono(2, 0))
    for l, power in _y_powers(y, window):
        if l == 1:
            yield x1 * power * dx, tag(mono(1, 1), zero)
        if l >= 2:
            yield power * dx, tag(mono(0, l), zero)
        if l >= 1:
            yield power * dy, tag(zero, mono(0, l))


# ---------------------------------------------------------------------------
# the plain row-echelon oracle
# ---------------------------------------------------------------------------


def monomial_function_pullbacks(n: int, y: TruncatedSeries, window: int):
    """Pullbacks ``x**k y**l`` (as series) of order below ``window``, labelled."""
    out = []
    for l, power in _y_powers(y, window):
        k = 0
        while k * n + l * y.valuation() < window:
            out.append(((k, l), power.shift(k * n)))
            k += 1
    return out


def monomial_form_pullbacks(n: int, y: TruncatedSeries, window: int):
    """Pullbacks of ``x**k y**l dx`` and ``x**k y**l dy`` of order below ``window``."""
    dx = TruncatedSeries.monomial(n - 1, n, y.truncation)
    dy = y.derivative()
    out = []
    m = y.valuation()
    for l, power in _y_powers(y, window):
        for label, base, base_order in ((("dx", l), power * dx, l * m + n - 1), (("dy", l), power * dy, l * m + m - 1)):
            k = 0
            while base_order + k * n < window:
                out.append(((label, k), base.shift(k * n)))
                k += 1
    return out


def echelon_orders(vectors: Sequence[TruncatedSeries], window: int) -> list[int]:
    """Orders attained by linear combinations, by Gaussian elimination.

    Each series is turned into its coefficient vector on ``t**0 .. t**(window-1)``;
    rows are processed in increasing order of valuation (ties by input order)
    and reduced left to right against the pivots found so far.  The pivot
    columns are the attainable orders below ``window``.
    """
    rows = []
    for s in vectors:
        coeffs = {k: c for k, c in s.coefficients.items() if k < window}
        if coeffs:
            rows.append(coeffs)
    rows.sort(key=min)
    pivots: dict[int, dict[int, Scalar]] = {}
    for row in rows:
        row = dict(row)
        while row:
            lead = min(row)
            pivot = pivots.get(lead)
            if pivot is None:
                pivots[lead] = row
                break
            factor = row[lead] / pivot[lead]
            for k, c in pivot.items():
                value = row.get(k, Scalar(0)) - factor * c
                if value:
                    row[k] = value
                else:
                    row.pop(k, None)
    return sorted(pivots)
