import pytest
import sympy as sp
from hypothesis import given, strategies as st

import oracles
from branchforge.errors import BadValuation, NonzeroConstantTerm, NotUnitOne, TruncationInsufficient, ZeroConstantTerm
from branchforge.scalar import ONE, Scalar
from branchforge.series import (
    BivariatePoly,
    TruncatedSeries,
    compose,
    compositional_inverse,
    derivative,
    eval_on_curve,
    nth_root_of_unit_series,
    partials,
    reciprocal,
)


def S(coeffs, N):
    return TruncatedSeries(coeffs, N)


def texts(series):
    return {k: str(v) for k, v in series.coefficients.items()}


def norm(expected):
    """Expected coefficients written as text, normalized through the parser."""
    return {k: str(Scalar.parse(v)) for k, v in expected.items()}


# -- strategies ---------------------------------------------------------------

small = st.integers(-4, 4)


@st.composite
def scalars(draw):
    return Scalar(draw(small)) / draw(st.integers(1, 4)) + Scalar(0, draw(small)) / draw(st.integers(1, 4))


@st.composite
def series(draw, N=None, valuation=0, unit=False):
    N = draw(st.integers(valuation, 14)) if N is None else N
    coeffs = draw(st.dictionaries(st.integers(valuation, max(N, valuation)), scalars(), max_size=6))
    if unit:
        coeffs[0] = ONE
    elif valuation > 0 and valuation <= N:
        coeffs[valuation] = draw(scalars().filter(bool))
    return S(coeffs, N)


@st.composite
def series_triple(draw):
    N = draw(st.integers(0, 14))
    return draw(series(N=N)), draw(series(N=N)), draw(series(N=N))


# -- ring operations ------------------------------------------------------------


def test_difference_of_squares():
    assert S({0: 1, 1: 1}, 5) * S({0: 1, 1: -1}, 5) == S({0: 1, 2: -1}, 5)


def test_zero_absorbs():
    s = S({0: 3, 2: Scalar(1, 1)}, 7)
    assert (s * S({}, 7)).is_zero()


def test_geometric_series_times_one_minus_t():
    geometric = S({k: 1 for k in range(21)}, 20)
    assert geometric * S({0: 1, 1: -1}, 20) == S({0: 1}, 20)


def test_truncation_of_products_is_the_guaranteed_one():
    # t^2 * (unknown above t^3) is known up to t^5
    assert (S({2: 1}, 10) * S({0: 1}, 3)).truncation == 5


def test_coefficient_above_truncation_is_unknown():
    with pytest.raises(TruncationInsufficient):
        S({0: 1}, 3).coefficient(4)


def test_exponents_above_truncation_are_dropped():
    assert S({1: 1, 9: 5}, 4).coefficients == {1: ONE}


@given(series_triple())
def test_ring_laws(abc):
    a, b, c = abc
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert a + b - b == a


# -- derivatives ------------------------------------------------------------------


@pytest.mark.parametrize("n", [1, 2, 6])
def test_derivative_of_monomial(n):
    assert derivative(S({n: 1}, 10)) == S({n - 1: n}, 9)


def test_derivative_example():
    assert texts(derivative(S({6: 1, 7: 1}, 10))) == norm({5: "6", 6: "7"})


def test_partial_y():
    p = BivariatePoly({(2, 0): 1, (1, 1): 1})
    px, py = partials(p)
    assert py == BivariatePoly({(1, 0): 1})
    assert px == BivariatePoly({(1, 0): 2, (0, 1): 1})


@given(series_triple())
def test_leibniz(abc):
    a, b, _ = abc
    assert derivative(a * b) == derivative(a) * b + a * derivative(b)


# -- composition and inversion ------------------------------------------------------


def test_compose_identity():
    g = S({1: 2, 3: Scalar(0, 1), 5: 7}, 8)
    assert compose(S({1: 1}, 8), g) == g


def test_compose_square():
    assert texts(compose(S({2: 1}, 4), S({1: 1, 2: 1}, 4))) == norm({2: "1", 3: "2", 4: "1"})


def test_compose_geometric_in_t_squared():
    geometric = S({k: 1 for k in range(5)}, 4)
    out = compose(geometric, S({2: 1}, 10))
    assert texts(out) == norm({0: "1", 2: "1", 4: "1", 6: "1", 8: "1"})
    assert out.truncation == 9


def test_compose_rejects_constant_term():
    with pytest.raises(NonzeroConstantTerm):
        compose(S({1: 1}, 3), S({0: 1, 1: 1}, 3))


def test_compose_matches_sympy_complex():
    t = oracles.t
    outer = t**2 + sp.I * t**3 + t**5 / 3
    inner = t + 2 * t**2 - sp.I * t**4
    expected = oracles.coefficient_texts(oracles.compose(outer, inner, 8), 8)
    got = compose(S({2: 1, 3: Scalar(0, 1), 5: Scalar(1) / 3}, 8), S({1: 1, 2: 2, 4: Scalar(0, -1)}, 8))
    assert texts(got) == norm(expected)


@pytest.mark.parametrize(
    "g, expected",
    [
        ({1: 1}, {1: "1"}),
        ({1: 2}, {1: "1/2"}),
        ({1: 1, 2: 1}, {1: "1", 2: "-1", 3: "2"}),
    ],
)
def test_compositional_inverse_examples(g, expected):
    assert texts(compositional_inverse(S(g, 3))) == norm(expected)


def test_compositional_inverse_complex_frozen():
    # sympy: inverse of t + i t^2 + t^3/3 up to t^6
    got = compositional_inverse(S({1: 1, 2: Scalar(0, 1), 3: Scalar(1) / 3}, 6))
    assert texts(got) == norm({1: "1", 2: "-1*i", 3: "-7/3", 4: "20/3*i", 5: "64/3", 6: "-658/9*i"})


def test_compositional_inverse_needs_valuation_one():
    with pytest.raises(BadValuation):
        compositional_inverse(S({2: 1}, 5))


@given(series(valuation=1))
def test_inverse_round_trip(g):
    if g.truncation < 1:
        return
    h = compositional_inverse(g)
    t = S({1: 1}, g.truncation)
    assert compose(g, h) == t
    assert compose(h, g) == t


# -- roots and reciprocals ------------------------------------------------------------


def test_root_of_one():
    assert nth_root_of_unit_series(S({0: 1}, 6), 5) == S({0: 1}, 6)


def test_exact_square_root():
    assert texts(nth_root_of_unit_series(S({0: 1, 1: 2, 2: 1}, 6), 2)) == norm({0: "1", 1: "1"})


def test_sqrt_one_plus_t():
    assert texts(nth_root_of_unit_series(S({0: 1, 1: 1}, 3), 2)) == norm({0: "1", 1: "1/2", 2: "-1/8", 3: "1/16"})


def test_cube_root_complex_matches_sympy():
    t = oracles.t
    expected = oracles.coefficient_texts(oracles.unit_power(1 + sp.I * t + t**2, sp.Rational(1, 3), 5), 5)
    got = nth_root_of_unit_series(S({0: 1, 1: Scalar(0, 1), 2: 1}, 5), 3)
    assert texts(got) == norm(expected)
    assert Scalar.parse(expected[5]) == Scalar(0, 1) * 277 / 729


def test_root_beyond_flint_default_cap():
    # coefficients well above t^10 must survive
    u = S({0: 1, 12: Scalar(-3) / 7}, 60)
    root = nth_root_of_unit_series(u, 6)
    assert root ** 6 == u
    assert root.coefficient(12) == Scalar(-1) / 14


def test_root_needs_unit_one():
    with pytest.raises(NotUnitOne):
        nth_root_of_unit_series(S({0: 2}, 3), 2)


@pytest.mark.parametrize(
    "u, expected",
    [({0: 1}, {0: "1"}), ({0: 2}, {0: "1/2"}), ({0: 1, 1: -1}, {0: "1", 1: "1", 2: "1", 3: "1"})],
)
def test_reciprocal_examples(u, expected):
    assert texts(reciprocal(S(u, 3))) == norm(expected)


def test_reciprocal_needs_unit():
    with pytest.raises(ZeroConstantTerm):
        reciprocal(S({1: 1}, 3))


@given(series(unit=True), st.integers(1, 7))
def test_root_and_reciprocal_laws(u, n):
    one = S({0: 1}, u.truncation)
    assert u * reciprocal(u) == one
    assert nth_root_of_unit_series(u, n) ** n == u


# -- bivariate polynomials on curves ----------------------------------------------------------


def test_eval_x_on_curve():
    assert eval_on_curve(BivariatePoly({(1, 0): 1}), S({4: 1}, 20), S({6: 1, 7: 1}, 20)) == S({4: 1}, 20)


def test_eval_y_squared():
    out = eval_on_curve(BivariatePoly({(0, 2): 1}), S({2: 1}, 12), S({3: 1}, 12))
    assert texts(out) == norm({6: "1"})


def test_eval_cusp_equation_on_perturbed_cusp():
    p = BivariatePoly({(0, 2): 1, (3, 0): -1})
    out = eval_on_curve(p, S({2: 1}, 12), S({3: 1, 4: 1}, 12))
    assert texts(out) == norm({7: "2", 8: "1"})


@given(st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)), scalars(), max_size=5))
def test_eval_on_curve_matches_sympy(coeffs):
    t = oracles.t
    x, y = t**3 + t**5, t**4 - sp.I * t**6
    expected = oracles.truncate(sum(sp.nsimplify(str(c).replace("*i", "*I")) * x**k * y**l
                                    for (k, l), c in coeffs.items()), 15)
    got = eval_on_curve(BivariatePoly(coeffs), S({3: 1, 5: 1}, 15), S({4: 1, 6: Scalar(0, -1)}, 15))
    assert texts(got) == norm(oracles.coefficient_texts(expected, 15))


@given(st.data(), st.integers(15, 45))
def test_laws_at_large_truncation(data, N):
    u = data.draw(series(N=N, unit=True))
    g = data.draw(series(N=N, valuation=1))
    one = S({0: 1}, N)
    assert u * reciprocal(u) == one
    assert nth_root_of_unit_series(u, 3) ** 3 == u
    assert compose(g, compositional_inverse(g)) == S({1: 1}, N)
