"""Independent reference computations with sympy, used only by the tests.

Nothing here calls into branchforge: branches are plain ``(n, {exp: coeff})``
data and all arithmetic is sympy's exact rational/Gaussian arithmetic.
"""

import sympy as sp

t = sp.Symbol("t")


def branch_exprs(n, terms):
    x = t**n
    y = sum(sp.nsimplify(c) * t**e for e, c in terms.items())
    return x, y


def _coefficient_row(expr, window):
    poly = sp.Poly(sp.expand(expr), t)
    row = [0] * (window + 1)
    for (k,), c in poly.terms():
        if k <= window:
            row[k] = c
    return row


def attained_orders(exprs, window):
    """All valuations <= window of nonzero combinations of ``exprs`` (rref pivot columns)."""
    rows = [_coefficient_row(e, window) for e in exprs]
    rows = [r for r in rows if any(r)]
    if not rows:
        return []
    _, pivots = sp.Matrix(rows).rref()
    return sorted(pivots)


def value_semigroup(n, terms, window):
    """Orders of f(x(t), y(t)) over all polynomials f, up to ``window``."""
    x, y = branch_exprs(n, terms)
    m = min(terms)
    monomials = [x**k * y**l for k in range(window // n + 1) for l in range(window // m + 1) if k * n + l * m <= window]
    return attained_orders(monomials, window)


def contact_orders(n, terms, window):
    """Contact orders (pullback valuation + 1) of all polynomial 1-forms, up to ``window``."""
    x, y = branch_exprs(n, terms)
    m = min(terms)
    dx, dy = sp.diff(x, t), sp.diff(y, t)
    pulled = []
    for k in range(window // n + 1):
        for l in range(window // m + 1):
            mono = x**k * y**l
            if k * n + l * m + n - 1 <= window:
                pulled.append(mono * dx)
            if k * n + l * m + m - 1 <= window:
                pulled.append(mono * dy)
    return [v + 1 for v in attained_orders(pulled, window - 1)]


def frobenius_scan(generators, limit):
    """Elements of the semigroup generated by ``generators`` below ``limit``."""
    members = {0}
    for s in range(1, limit):
        if any(s - g in members for g in generators if s >= g):
            members.add(s)
    return members


def truncate(expr, order):
    """Drop powers of t above ``order``."""
    poly = sp.Poly(sp.expand(expr), t)
    return sum(c * t**k for (k,), c in poly.terms() if k <= order)


def compose(outer, inner, order):
    """outer(inner(t)) modulo t^(order+1), by Horner with truncation."""
    coeffs = sp.Poly(sp.expand(outer), t).all_coeffs()
    acc = sp.Integer(0)
    for c in coeffs:
        acc = truncate(acc * inner + c, order)
    return sp.expand(acc)


def inverse_series(g, order):
    """Compositional inverse of g (valuation 1), fitted one coefficient at a time."""
    g1 = sp.expand(g).coeff(t, 1)
    h = t / g1
    for k in range(2, order + 1):
        err = compose(g, h, order).coeff(t, k)
        h = sp.expand(h - err / g1 * t**k)
    return h


def unit_power(u, exponent, order):
    """u^exponent for u(0) = 1 via the binomial series."""
    w = sp.expand(u - 1)
    acc, term = sp.Integer(1), sp.Integer(1)
    for j in range(1, order + 1):
        term = truncate(term * w, order)
        acc += sp.binomial(exponent, j) * term
    return sp.expand(acc)


def renormalized_y(n, x, y, order):
    """y(t(u)) where u = t * (x/t^n)^(1/n); returned as a polynomial in t standing for u."""
    w = sp.expand(x / t**n)
    u = sp.expand(t * unit_power(w, sp.Rational(1, n), order))
    t_of_u = inverse_series(u, order)
    return compose(y, t_of_u, order)


def scalar_text(c):
    """A sympy Gaussian rational as branchforge's text form."""
    c = sp.nsimplify(c)
    re, im = sp.re(c), sp.im(c)
    if im == 0:
        return str(re)
    sign = "+" if im > 0 else "-"
    return f"{re}{sign}{abs(im)}*i"


def coefficient_texts(expr, order):
    """``{k: text}`` for the nonzero coefficients of a polynomial in t up to ``order``."""
    poly = sp.Poly(sp.expand(expr), t)
    return {k: scalar_text(c) for (k,), c in poly.terms() if k <= order and c != 0}
