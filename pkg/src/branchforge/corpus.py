"""Seeded random branches, vector fields and forms for tests and self-tests."""

from __future__ import annotations

import random

from .branch import PuiseuxBranch, _char_exponents, semigroup_from_exponents
from .errors import NonPrimitive
from .scalar import Scalar
from .series import BivariatePoly, TruncatedSeries

__all__ = [
    "random_scalar",
    "random_branch",
    "random_corpus",
    "random_series",
    "random_unit",
    "random_eligible_field_terms",
]

_I = Scalar(0, 1)


def random_scalar(rng: random.Random, bound: int = 5, complex_prob: float = 0.5, nonzero: bool = True) -> Scalar:
    """A small random Gaussian rational."""
    while True:
        re = Scalar(rng.randint(-bound, bound)) / rng.randint(1, bound)
        im = Scalar(0)
        if rng.random() < complex_prob:
            im = Scalar(rng.randint(-bound, bound)) / rng.randint(1, bound)
        value = re + im * _I
        if value or not nonzero:
            return value


def random_branch(
    rng: random.Random,
    n_choices=(3, 4, 5, 6, 7),
    max_conductor: int = 120,
    density: float = 0.5,
    complex_prob: float = 0.5,
) -> PuiseuxBranch:
    """A random Puiseux branch with ``n`` from ``n_choices`` and ``n < m <= 3n``, ``n`` not dividing ``m``.

    Coefficients are random Gaussian rationals on a random support below
    the conductor; the truncation is ``c + n + 2``.
    """
    while True:
        n = rng.choice(list(n_choices))
        m = rng.choice([k for k in range(n + 1, 3 * n + 1) if k % n])
        terms = {m: Scalar(1)}
        for e in range(m + 1, max_conductor + n):
            if rng.random() < density:
                terms[e] = random_scalar(rng, complex_prob=complex_prob)
        try:
            betas = _char_exponents(n, terms)
        except NonPrimitive:
            continue
        c = semigroup_from_exponents(betas).conductor
        if c > max_conductor:
            continue
        kept = {e: a for e, a in terms.items() if e < c or e in betas[1:]}
        return PuiseuxBranch(n, kept, c + n + 2)


def random_corpus(seed: int, count: int, **kwargs) -> list[PuiseuxBranch]:
    rng = random.Random(seed)
    return [random_branch(rng, **kwargs) for _ in range(count)]


def random_series(rng: random.Random, truncation: int, valuation: int = 0, density: float = 0.7) -> TruncatedSeries:
    coeffs = {k: random_scalar(rng) for k in range(valuation, truncation + 1) if rng.random() < density}
    if valuation <= truncation:
        coeffs[valuation] = random_scalar(rng)
    return TruncatedSeries(coeffs, truncation)


def random_unit(rng: random.Random, truncation: int) -> TruncatedSeries:
    """A random series with constant term exactly 1."""
    s = random_series(rng, truncation)
    coeffs = s.coefficients
    coeffs[0] = Scalar(1)
    return TruncatedSeries(coeffs, truncation)


def random_eligible_field_terms(rng: random.Random, terms: int = 4, max_degree: int = 3):
    """Random ``(X1, Y1)`` with ``Y1`` in (x,y)^2 and ``ord_x X1(x,0) >= 2``."""
    X1, Y1 = {}, {}
    for _ in range(terms):
        deg = rng.randint(1, max_degree)
        k = rng.randint(0, deg)
        l = deg - k
        if l == 0 and k < 2:
            k = 2
        X1[(k, l)] = random_scalar(rng, bound=3)
    for _ in range(terms):
        deg = rng.randint(2, max_degree)
        k = rng.randint(0, deg)
        Y1[(k, deg - k)] = random_scalar(rng, bound=3)
    return BivariatePoly(X1), BivariatePoly(Y1)
