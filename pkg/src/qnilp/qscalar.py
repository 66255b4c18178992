"""Exact rational functions in q with integer coefficients.

A :class:`LaurentRational` stores ``q**shift * num(q) / den(q)`` where ``num``
and ``den`` are integer polynomials with nonzero constant terms, ``den`` has a
positive leading coefficient and ``gcd(num, den) == 1``.  That normal form is
unique, so equality and hashing work on the stored fields directly.
"""

from __future__ import annotations

import re
from functools import lru_cache

from flint import fmpz_poly

__all__ = [
    "LaurentRational",
    "ONE",
    "ZERO",
    "hat",
    "parse",
    "qfact",
    "qint",
    "qpow",
]

_ONE_POLY = fmpz_poly([1])
_ZERO_POLY = fmpz_poly([])


def _strip_low(p: fmpz_poly) -> tuple[fmpz_poly, int]:
    """Split ``p`` as ``q**k * p'`` with ``p'(0) != 0``."""
    coeffs = p.coeffs()
    k = 0
    while k < len(coeffs) and coeffs[k] == 0:
        k += 1
    if k == 0:
        return p, 0
    return fmpz_poly(coeffs[k:]), k


class LaurentRational:
    """An element of the field Q(q), kept in canonical reduced form."""

    __slots__ = ("num", "den", "shift", "_key")

    num: fmpz_poly
    den: fmpz_poly
    shift: int

    def __init__(self, num: fmpz_poly | int = 0, den: fmpz_poly | int = 1, shift: int = 0):
        if not isinstance(num, fmpz_poly):
            num = fmpz_poly([num])
        if not isinstance(den, fmpz_poly):
            den = fmpz_poly([den])
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        self._key = None
        if num == 0:
            self.num, self.den, self.shift = _ZERO_POLY, _ONE_POLY, 0
            return
        num, a = _strip_low(num)
        den, b = _strip_low(den)
        shift += a - b
        g = num.gcd(den)
        if not g.is_one():
            num = num // g
            den = den // g
        if den.leading_coefficient() < 0:
            num, den = -num, -den
        self.num, self.den, self.shift = num, den, shift

    @classmethod
    def _raw(cls, num: fmpz_poly, den: fmpz_poly, shift: int) -> LaurentRational:
        obj = object.__new__(cls)
        obj.num, obj.den, obj.shift, obj._key = num, den, shift, None
        return obj

    # -- predicates -------------------------------------------------------
    def is_zero(self) -> bool:
        return self.num == 0

    def is_laurent(self) -> bool:
        """True when the denominator is 1."""
        return self.den == 1

    def key(self) -> tuple:
        if self._key is None:
            self._key = (self.shift, tuple(int(c) for c in self.num.coeffs()),
                         tuple(int(c) for c in self.den.coeffs()))
        return self._key

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            other = LaurentRational(other)
        if not isinstance(other, LaurentRational):
            return NotImplemented
        return self.shift == other.shift and self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        return hash(self.key())

    def __bool__(self) -> bool:
        return self.num != 0

    # -- arithmetic -------------------------------------------------------
    def __neg__(self) -> LaurentRational:
        return LaurentRational._raw(-self.num, self.den, self.shift)

    def __add__(self, other: LaurentRational | int) -> LaurentRational:
        if isinstance(other, int):
            other = LaurentRational(other)
        if other.num == 0:
            return self
        if self.num == 0:
            return other
        s = min(self.shift, other.shift)
        a = self.num * _qp(self.shift - s)
        b = other.num * _qp(other.shift - s)
        if self.den == other.den:
            if self.den == 1:
                return _from_laurent(a + b, s)
            return LaurentRational(a + b, self.den, s)
        return LaurentRational(a * other.den + b * self.den, self.den * other.den, s)

    __radd__ = __add__

    def __sub__(self, other: LaurentRational | int) -> LaurentRational:
        if isinstance(other, int):
            other = LaurentRational(other)
        return self + (-other)

    def __rsub__(self, other: int) -> LaurentRational:
        return LaurentRational(other) - self

    def __mul__(self, other: LaurentRational | int) -> LaurentRational:
        if isinstance(other, int):
            if other == 0:
                return ZERO
            if self.den == 1:
                return LaurentRational._raw(self.num * other, self.den, self.shift)
            return LaurentRational(self.num * other, self.den, self.shift)
        if self.num == 0 or other.num == 0:
            return ZERO
        if self.den == 1 and other.den == 1:
            return LaurentRational._raw(self.num * other.num, _ONE_POLY, self.shift + other.shift)
        return LaurentRational(self.num * other.num, self.den * other.den, self.shift + other.shift)

    __rmul__ = __mul__

    def inverse(self) -> LaurentRational:
        if self.num == 0:
            raise ZeroDivisionError("inverse of zero")
        return LaurentRational(self.den, self.num, -self.shift)

    def __truediv__(self, other: LaurentRational | int) -> LaurentRational:
        if isinstance(other, int):
            other = LaurentRational(other)
        return self * other.inverse()

    def __rtruediv__(self, other: int) -> LaurentRational:
        return LaurentRational(other) * self.inverse()

    def __pow__(self, k: int) -> LaurentRational:
        if k < 0:
            return self.inverse() ** (-k)
        result = ONE
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- evaluation helpers -----------------------------------------------
    def at_one(self):
        """Value at q = 1 as a Fraction (raises if the denominator vanishes)."""
        from fractions import Fraction

        d = int(self.den(1))
        if d == 0:
            raise ZeroDivisionError("pole at q = 1")
        return Fraction(int(self.num(1)), d)

    # -- text form --------------------------------------------------------
    def __str__(self) -> str:
        num = _laurent_text(self.num, self.shift)
        den = _laurent_text(self.den, 0)
        return f"{_wrap(num)} / {_wrap(den)}"

    def __repr__(self) -> str:
        return f"LaurentRational({self})"

    def pretty(self) -> str:
        """Compact display form: drops a unit denominator."""
        num = _laurent_text(self.num, self.shift)
        if self.den == 1:
            return num
        return f"{_wrap(num)} / {_wrap(_laurent_text(self.den, 0))}"


@lru_cache(maxsize=256)
def _qp(k: int) -> fmpz_poly:
    return fmpz_poly([0] * k + [1])


def _from_laurent(p: fmpz_poly, shift: int) -> LaurentRational:
    if p == 0:
        return ZERO
    p, a = _strip_low(p)
    return LaurentRational._raw(p, _ONE_POLY, shift + a)


def _wrap(text: str) -> str:
    body = text[1:] if text.startswith("-") else text
    if " " in body:
        return f"({text})"
    return text


def _laurent_text(p: fmpz_poly, shift: int) -> str:
    coeffs = [int(c) for c in p.coeffs()]
    parts: list[str] = []
    for k in range(len(coeffs) - 1, -1, -1):
        c = coeffs[k]
        if c == 0:
            continue
        e = k + shift
        if e == 0:
            mono = str(abs(c))
        else:
            q = "q" if e == 1 else f"q^{e}"
            mono = q if abs(c) == 1 else f"{abs(c)}*{q}"
        if not parts:
            parts.append(mono if c > 0 else f"-{mono}")
        else:
            parts.append(f"+ {mono}" if c > 0 else f"- {mono}")
    return " ".join(parts) if parts else "0"


_TERM = re.compile(r"([+-]?)\s*(\d+)?\s*(\*?\s*q(?:\^\s*(-?\d+))?)?")


def _parse_laurent(text: str) -> LaurentRational:
    text = text.strip()
    if text.startswith("(") and text.endswith(")"):
        text = text[1:-1].strip()
    if not text:
        raise ValueError("empty polynomial")
    terms: dict[int, int] = {}
    pos = 0
    compact = text.replace(" ", "")
    while pos < len(compact):
        m = _TERM.match(compact, pos)
        if m is None or m.end() == pos:
            raise ValueError(f"cannot parse {text!r}")
        sign, digits, qpart, exp = m.groups()
        if digits is None and qpart is None:
            raise ValueError(f"cannot parse {text!r}")
        c = int(digits) if digits is not None else 1
        if sign == "-":
            c = -c
        e = 0
        if qpart is not None:
            e = int(exp) if exp is not None else 1
        terms[e] = terms.get(e, 0) + c
        pos = m.end()
    if not terms:
        return ZERO
    low = min(terms)
    coeffs = [0] * (max(terms) - low + 1)
    for e, c in terms.items():
        coeffs[e - low] += c
    return LaurentRational(fmpz_poly(coeffs), 1, low)


def _split_top(text: str) -> list[str]:
    depth = 0
    for idx, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "/" and depth == 0:
            return [text[:idx], text[idx + 1:]]
    return [text]


def parse(text: str) -> LaurentRational:
    """Inverse of ``str``: reads ``num / den`` or a bare Laurent polynomial."""
    pieces = _split_top(text.strip())
    value = _parse_laurent(pieces[0])
    if len(pieces) == 2:
        value = value / _parse_laurent(pieces[1])
    return value


ZERO = LaurentRational._raw(_ZERO_POLY, _ONE_POLY, 0)
ONE = LaurentRational._raw(_ONE_POLY, _ONE_POLY, 0)


@lru_cache(maxsize=None)
def qpow(e: int) -> LaurentRational:
    """The monomial q**e."""
    return LaurentRational._raw(_ONE_POLY, _ONE_POLY, e)


@lru_cache(maxsize=None)
def qint(k: int, d: int = 1) -> LaurentRational:
    """Quantum integer [k] evaluated at v = q**d."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k == 0:
        return ZERO
    coeffs = [0] * (2 * d * (k - 1) + 1)
    for t in range(k):
        coeffs[2 * d * t] = 1
    return LaurentRational._raw(fmpz_poly(coeffs), _ONE_POLY, -d * (k - 1))


@lru_cache(maxsize=None)
def qfact(k: int, d: int = 1) -> LaurentRational:
    """Quantum factorial [k]! at v = q**d."""
    result = ONE
    for t in range(1, k + 1):
        result = result * qint(t, d)
    return result


def hat(a: LaurentRational) -> LaurentRational:
    """The map v -> v - 1/v."""
    return a - a.inverse()
