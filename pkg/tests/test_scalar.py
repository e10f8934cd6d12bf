import pytest
from hypothesis import given, strategies as st

from branchforge.scalar import I, ONE, ZERO, Scalar, ScalarParseError

rationals = st.fractions(max_denominator=50).map(lambda f: (f.numerator, f.denominator))


@st.composite
def scalars(draw, nonzero=False):
    (a, b), (c, d) = draw(rationals), draw(rationals)
    value = Scalar(a) / b + Scalar(0, c) / d
    if nonzero and not value:
        value = ONE
    return value


@pytest.mark.parametrize(
    "text, re, im",
    [
        ("3", "3", "0"),
        ("-3/4", "-3/4", "0"),
        ("i", "0", "1"),
        ("-i", "0", "-1"),
        ("2/3*i", "0", "2/3"),
        ("1/2+3*i", "1/2", "3"),
        ("1/2 - 3/5*i", "1/2", "-3/5"),
        ("-1-i", "-1", "-1"),
    ],
)
def test_parse(text, re, im):
    value = Scalar.parse(text)
    assert str(value.re) == re and str(value.im) == im


@pytest.mark.parametrize("text", ["", "x", "1.5", "1/0", "3*j", "i*i", "1++i"])
def test_parse_rejects(text):
    with pytest.raises((ScalarParseError, ZeroDivisionError)):
        Scalar.parse(text)


def test_i_squared_is_minus_one():
    assert I * I == -ONE


def test_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        ONE / ZERO


def test_hash_matches_equality():
    assert hash(Scalar(2)) == hash(Scalar.parse("4/2"))
    assert len({Scalar(1, 2), Scalar.parse("1+2*i")}) == 1


@given(scalars())
def test_text_round_trip(a):
    assert Scalar.parse(str(a)) == a


@given(scalars(), scalars(), scalars())
def test_field_laws(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == ZERO


@given(scalars(nonzero=True))
def test_inverse(a):
    assert a * a.inverse() == ONE
    assert a * a.conjugate() == Scalar(a.norm())
