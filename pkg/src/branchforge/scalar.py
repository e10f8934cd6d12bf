"""Exact Gaussian rationals.

A :class:`Scalar` is an element ``a + b*i`` of Q(i) with ``a`` and ``b``
stored as FLINT rationals (``flint.fmpq``).  All arithmetic is exact.

The text form used by the JSON documents and by ``str()`` is::

    "p/q"            real values ("3" when the denominator is 1)
    "p/q+r/s*i"      values with a nonzero imaginary part
    "p/q-r/s*i"

:meth:`Scalar.parse` is more lenient than the writer and also accepts
``"i"``, ``"-2i"``, ``"1 + 3/4*i"`` and similar spellings.
"""

from __future__ import annotations

import re
from fractions import Fraction
from numbers import Rational

from flint import fmpq, fmpz

__all__ = ["Scalar", "as_fmpq", "ScalarParseError"]


class ScalarParseError(ValueError):
    """Raised when a scalar string is not a valid Gaussian rational."""


_RAT = r"\d+(?:/\d+)?"
_REAL_RE = re.compile(rf"^(?P<re>[+-]?{_RAT})$")
_IMAG_RE = re.compile(rf"^(?P<im>[+-]?(?:{_RAT})?)\*?i$")
_FULL_RE = re.compile(rf"^(?P<re>[+-]?{_RAT})(?P<im>[+-](?:{_RAT})?)\*?i$")


def as_fmpq(value) -> fmpq:
    """Convert an int, fmpz, fmpq, Fraction or rational string to ``fmpq``."""
    if isinstance(value, fmpq):
        return value
    if isinstance(value, (int, fmpz)):
        return fmpq(value)
    if isinstance(value, Fraction):
        return fmpq(value.numerator, value.denominator)
    if isinstance(value, Rational):
        return fmpq(int(value.numerator), int(value.denominator))
    if isinstance(value, str):
        return _parse_rational(value.strip())
    raise TypeError(f"cannot convert {type(value).__name__} to an exact rational")


def _parse_rational(text: str) -> fmpq:
    if not re.fullmatch(rf"[+-]?{_RAT}", text):
        raise ScalarParseError(f"not a rational number: {text!r}")
    sign = -1 if text.startswith("-") else 1
    body = text.lstrip("+-")
    if "/" in body:
        num, den = body.split("/")
        if int(den) == 0:
            raise ScalarParseError(f"zero denominator in {text!r}")
        return fmpq(sign * int(num), int(den))
    return fmpq(sign * int(body))


def _imag_part(token: str) -> fmpq:
    if token in ("", "+"):
        return fmpq(1)
    if token == "-":
        return fmpq(-1)
    return _parse_rational(token)


def _format_rational(q: fmpq) -> str:
    if q.q == 1:
        return str(q.p)
    return f"{q.p}/{q.q}"


class Scalar:
    """An exact element of Q(i).

    Instances are immutable and hashable; a real scalar hashes like the
    corresponding ``fmpq`` so that ``Scalar(2) == 2`` and both can live in
    the same set.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if isinstance(re, Scalar):
            if im:
                raise TypeError("cannot combine a Scalar real part with an imaginary part")
            object.__setattr__(self, "re", re.re)
            object.__setattr__(self, "im", re.im)
            return
        object.__setattr__(self, "re", as_fmpq(re))
        object.__setattr__(self, "im", as_fmpq(im))

    @classmethod
    def _make(cls, re: fmpq, im: fmpq) -> "Scalar":
        obj = object.__new__(cls)
        object.__setattr__(obj, "re", re)
        object.__setattr__(obj, "im", im)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("Scalar is immutable")

    # -- conversion -----------------------------------------------------

    @classmethod
    def coerce(cls, value) -> "Scalar":
        """Return ``value`` as a Scalar, parsing strings."""
        if isinstance(value, Scalar):
            return value
        if isinstance(value, str):
            return cls.parse(value)
        if isinstance(value, complex):
            raise TypeError("floating point complex numbers are not exact")
        return cls(value)

    @classmethod
    def parse(cls, text: str) -> "Scalar":
        """Parse the text form, e.g. ``"3/2-1/5*i"``."""
        if not isinstance(text, str):
            raise ScalarParseError(f"expected a string, got {type(text).__name__}")
        compact = text.replace(" ", "")
        if not compact:
            raise ScalarParseError("empty scalar")
        match = _REAL_RE.match(compact)
        if match:
            return cls._make(_parse_rational(match["re"]), fmpq(0))
        match = _IMAG_RE.match(compact)
        if match:
            return cls._make(fmpq(0), _imag_part(match["im"]))
        match = _FULL_RE.match(compact)
        if match:
            return cls._make(_parse_rational(match["re"]), _imag_part(match["im"]))
        raise ScalarParseError(f"not a Gaussian rational: {text!r}")

    def __str__(self) -> str:
        if self.im == 0:
            return _format_rational(self.re)
        sign = "-" if self.im < 0 else "+"
        return f"{_format_rational(self.re)}{sign}{_format_rational(abs(self.im))}*i"

    def __repr__(self) -> str:
        return f"Scalar('{self}')"

    # -- predicates -----------------------------------------------------

    def __bool__(self) -> bool:
        return self.re != 0 or self.im != 0

    def is_zero(self) -> bool:
        return not self

    def is_real(self) -> bool:
        return self.im == 0

    def __eq__(self, other) -> bool:
        if isinstance(other, Scalar):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, fmpz, fmpq, Fraction)):
            return self.im == 0 and self.re == as_fmpq(other)
        return NotImplemented

    def __hash__(self) -> int:
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    # -- arithmetic -----------------------------------------------------

    def __add__(self, other):
        other = _coerce_operand(other)
        if other is None:
            return NotImplemented
        return Scalar._make(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce_operand(other)
        if other is None:
            return NotImplemented
        return Scalar._make(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = _coerce_operand(other)
        if other is None:
            return NotImplemented
        return other - self

    def __neg__(self):
        return Scalar._make(-self.re, -self.im)

    def __pos__(self):
        return self

    def __mul__(self, other):
        other = _coerce_operand(other)
        if other is None:
            return NotImplemented
        a, b, c, d = self.re, self.im, other.re, other.im
        if b == 0 and d == 0:
            return Scalar._make(a * c, fmpq(0))
        return Scalar._make(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        if not self:
            raise ZeroDivisionError("inverse of zero scalar")
        norm = self.re * self.re + self.im * self.im
        return Scalar._make(self.re / norm, -self.im / norm)

    def __truediv__(self, other):
        other = _coerce_operand(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = _coerce_operand(other)
        if other is None:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = ONE
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def conjugate(self) -> "Scalar":
        return Scalar._make(self.re, -self.im)

    def norm(self) -> fmpq:
        """The field norm ``re**2 + im**2``."""
        return self.re * self.re + self.im * self.im

    def height(self) -> int:
        """Number of bits in the largest numerator or denominator."""
        return max(
            int(abs(self.re.p)).bit_length(),
            int(self.re.q).bit_length(),
            int(abs(self.im.p)).bit_length(),
            int(self.im.q).bit_length(),
        )


def _coerce_operand(value):
    if isinstance(value, Scalar):
        return value
    if isinstance(value, (int, fmpz, fmpq, Fraction)):
        return Scalar._make(as_fmpq(value), fmpq(0))
    return None


ZERO = Scalar._make(fmpq(0), fmpq(0))
ONE = Scalar._make(fmpq(1), fmpq(0))
I = Scalar._make(fmpq(0), fmpq(1))
