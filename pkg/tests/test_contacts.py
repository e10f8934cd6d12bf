import random

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from branchforge.branch import INFINITY, AboveTruncation, preprocess, semigroup
from branchforge.contacts import (
    DifferentialForm,
    colinearity_order,
    contact_transfer_residual,
    lambda_form,
    lambda_set,
    pullback_order,
    value_witness,
    witness_form,
    zariski_lambda,
)
from branchforge.corpus import random_branch, random_series, random_unit
from branchforge.errors import NoSuchContact, TruncationInsufficient
from branchforge.normalform import random_equivalent_pair, reduce
from branchforge.scalar import ONE
from branchforge.series import BivariatePoly, TruncatedSeries, eval_on_curve, reciprocal
from branchforge.staircase import echelon_orders, monomial_form_pullbacks, monomial_function_pullbacks


def B(n, terms, N=None):
    return preprocess(n, terms, N).branch


def form(a=None, b=None):
    return DifferentialForm.from_terms(a, b)


def small_branch(seed, max_conductor=40):
    return random_branch(random.Random(seed), max_conductor=max_conductor)


# -- pullback orders -------------------------------------------------------------------


@pytest.mark.parametrize(
    "w, v",
    [
        (form({(0, 0): 1}), 4),
        (form(None, {(0, 0): 1}), 6),
        (form({(0, 1): -6}, {(1, 0): 4}), 11),
    ],
)
def test_pullback_order_examples(w, v):
    assert pullback_order(B(4, {6: 1, 7: 1}), w) == v


def test_pullback_order_of_the_cusp_equation_form():
    # d(y^2 - x^3) vanishes identically on the cusp
    w = form({(2, 0): -3}, {(0, 1): 2})
    assert pullback_order(B(2, {3: 1}), w) is AboveTruncation


def test_lambda_form_has_contact_lambda_plus_n():
    assert pullback_order(B(4, {6: 1, 7: 1}), lambda_form(4, 6)) == 7 + 4


# -- Lambda and lambda ----------------------------------------------------------------------


@pytest.mark.parametrize(
    "n, terms, lam",
    [(2, {3: 1}, INFINITY), (4, {6: 1, 7: 1}, 7), (3, {7: 1, 8: 1}, 8), (3, {7: 1, 11: 1}, INFINITY)],
)
def test_zariski_lambda_examples(n, terms, lam):
    assert zariski_lambda(B(n, terms)) == lam


@pytest.mark.parametrize(
    "n, terms",
    [(4, {6: 1, 7: 1}), (3, {7: 1, 8: 1}), (3, {7: 1, 11: 1}), (2, {3: 1}), (4, {6: 1, 7: "i", 9: "1/2"})],
)
def test_lambda_set_matches_sympy_oracle(n, terms):
    b = B(n, terms)
    data = lambda_set(b)
    expected = oracles.contact_orders(n, {e: str(c).replace("*i", "*I") for e, c in b.y_terms}, data.bound)
    assert list(data.orders) == expected


def test_lambda_set_of_4_6_7():
    data = lambda_set(B(4, {6: 1, 7: 1}))
    assert data.orders == (4, 6, 8, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20)
    assert 11 in data and 9 not in data
    assert 10_000 in data  # everything above c + n is attained


def test_lambda_set_needs_truncation():
    with pytest.raises(TruncationInsufficient):
        lambda_set(B(4, {6: 1, 7: 1}, 18))


@settings(max_examples=25)
@given(st.integers(0, 10_000))
def test_lambda_set_matches_monomial_echelon(seed):
    b = small_branch(seed)
    S = semigroup(b)
    data = lambda_set(b, S)
    window = S.conductor + b.n
    forms = [series for _, series in monomial_form_pullbacks(b.n, b.y, window)]
    assert list(data.orders) == [e + 1 for e in echelon_orders(forms, window)]
    functions = [series for _, series in monomial_function_pullbacks(b.n, b.y, window + 1)]
    assert echelon_orders(functions, window + 1) == [s for s in range(window + 1) if s in S]


@settings(max_examples=25)
@given(st.integers(0, 10_000))
def test_lambda_set_structure(seed):
    b = small_branch(seed)
    S = semigroup(b)
    c = S.conductor
    data = lambda_set(b, S)
    assert all(s + b.n in data for s in range(c + 1) if s in S)
    outside = [v for v in data.orders if v not in S]
    if data.lam == INFINITY:
        assert not outside
    else:
        assert b.m < data.lam < c
        assert min(outside) == data.lam + b.n
    for v in data.orders:
        assert pullback_order(b, data.witness(v)) == v


@settings(max_examples=15)
@given(st.integers(0, 10_000))
def test_lambda_set_invariant_under_coordinate_changes(seed):
    b = small_branch(seed, 30)
    data = lambda_set(b)
    _, image = random_equivalent_pair(b, seed)
    other = lambda_set(image)
    assert other.orders == data.orders and other.lam == data.lam
    assert semigroup(image) == semigroup(b)


# -- witnesses ------------------------------------------------------------------------------


def test_witness_for_p_times_m():
    w = witness_form(B(3, {7: 1, 11: 1}), 11)
    assert w == form(None, {(0, 1): 1})


def test_witness_for_semigroup_element():
    b = B(4, {6: 1, 7: 1})
    w = witness_form(b, 10)
    assert w == form({(1, 1): 1})
    assert value_witness(b, 10) == BivariatePoly({(1, 1): 1})


def test_witness_for_j8_on_4_6_7_8():
    b = B(4, {6: 1, 7: 1, 8: 1})
    w = witness_form(b, 8)
    # 8 lies in the semigroup, so the g dx construction is preferred
    assert w == form({(2, 0): 1})
    assert pullback_order(b, w) == 12 and w.is_flow_eligible()
    # y dy also has contact 12 on this branch
    ydy = form(None, {(0, 1): 1})
    pulled = eval_on_curve(ydy.B, b.x, b.y) * b.ydot
    assert {k: str(v) for k, v in pulled.coefficients.items() if k <= 13} == {11: "6", 12: "13", 13: "21"}


def test_witness_errors():
    with pytest.raises(NoSuchContact):
        witness_form(B(3, {7: 1}), 8)  # 8 + 3 = 11 is not a contact order of (t^3, t^7)
    with pytest.raises(NoSuchContact):
        witness_form(B(4, {6: 1, 7: 1}), 7)  # lambda itself


@settings(max_examples=20)
@given(st.integers(0, 10_000))
def test_witness_colinearity(seed):
    b = small_branch(seed)
    c = semigroup(b).conductor
    data = lambda_set(b)
    candidates = [e for e, _ in b.y_terms if b.m < e < c and e != data.lam and e + b.n in data]
    if not candidates:
        return
    j = candidates[0]
    w = witness_form(b, j, data)
    assert w.is_flow_eligible()
    a = eval_on_curve(w.B, b.x, b.y)
    bb = -eval_on_curve(w.A, b.x, b.y)
    col = colinearity_order((a, bb), (b.xdot, b.ydot))
    assert col.order == j + b.n - 1 and col.coefficient


# -- colinearity and contact transfer ------------------------------------------------------


def test_colinearity_examples():
    u = (TruncatedSeries({0: 1}, 6), TruncatedSeries({1: 1}, 6))
    assert colinearity_order(u, u) is AboveTruncation
    col = colinearity_order(u, (TruncatedSeries({0: 1}, 6), TruncatedSeries({1: 1, 3: 1}, 6)))
    assert col.order == 3 and col.coefficient == ONE


@given(st.integers(0, 10_000))
def test_contact_transfer_identity(seed):
    rng = random.Random(seed)
    N = rng.randint(8, 30)
    j = rng.randint(1, N - 1)
    p = random_unit(rng, N)
    q, a, A, Bs = (random_series(rng, N) for _ in range(4))
    d = TruncatedSeries(random_unit(rng, N - j).coefficients, N - j)
    b = (a * q - d.shift(j)) * reciprocal(p)
    col = colinearity_order((a, b), (p, q))
    assert col.order == j and col.coefficient == d.coefficient(0)
    residual = contact_transfer_residual((a, b), (p, q), A, Bs)
    assert residual.valuation() is None or residual.valuation() >= j
    assert residual == -(Bs * reciprocal(p) * d.shift(j))


@settings(max_examples=10)
@given(st.integers(0, 10_000))
def test_lambda_form_on_short_forms(seed):
    b = small_branch(seed, 40)
    nf = reduce(b)
    if nf.lam == INFINITY:
        return
    assert nf.coefficient(nf.lam)
    assert pullback_order(nf.to_branch(), lambda_form(b.n, b.m)) == nf.lam + b.n
