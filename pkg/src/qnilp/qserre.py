"""Exact zero test in the positive part of a quantum group.

The positive part is realized as the free algebra on E_1..E_n modulo the
two-sided ideal generated by the q-Serre elements.  Each multidegree is
handled separately: the ideal's component is spanned by words ``u * S * v``
and row-reduced over Q(q).  This is only meant for small degrees and serves as
an independent check of the PBW engine.
"""

from __future__ import annotations

import threading
from itertools import permutations
from math import factorial
from typing import Iterable, Mapping

from .cartan import RootSystem, RootVec
from .qscalar import ONE, ZERO, LaurentRational, qpow

__all__ = [
    "DEFAULT_WORD_CAP",
    "FreeElement",
    "IdealSlice",
    "OracleOutOfRange",
    "ideal_slice",
    "is_zero_mod_serre",
    "serre_element",
]

DEFAULT_WORD_CAP = 20000

FreeWord = tuple[int, ...]


class OracleOutOfRange(RuntimeError):
    """Raised when a multidegree has more words than the configured cap."""


class FreeElement:
    """A linear combination of words in the letters 1..n."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[FreeWord, LaurentRational] | None = None):
        self.terms: dict[FreeWord, LaurentRational] = {}
        if terms:
            for w, c in terms.items():
                if c:
                    self.terms[tuple(w)] = c

    @classmethod
    def letter(cls, i: int) -> FreeElement:
        return cls({(i,): ONE})

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self, n: int) -> RootVec | None:
        """Common content of all words, or None if inhomogeneous or zero."""
        degs = {_content(w, n) for w in self.terms}
        return degs.pop() if len(degs) == 1 else None

    def __add__(self, other: FreeElement) -> FreeElement:
        out = dict(self.terms)
        for w, c in other.terms.items():
            v = out.get(w, ZERO) + c
            if v:
                out[w] = v
            else:
                out.pop(w, None)
        res = FreeElement()
        res.terms = out
        return res

    def __neg__(self) -> FreeElement:
        res = FreeElement()
        res.terms = {w: -c for w, c in self.terms.items()}
        return res

    def __sub__(self, other: FreeElement) -> FreeElement:
        return self + (-other)

    def scale(self, c: LaurentRational | int) -> FreeElement:
        if isinstance(c, int):
            c = LaurentRational(c)
        if not c:
            return FreeElement()
        res = FreeElement()
        res.terms = {w: v * c for w, v in self.terms.items()}
        return res

    def __mul__(self, other: FreeElement) -> FreeElement:
        out: dict[FreeWord, LaurentRational] = {}
        for a, ca in self.terms.items():
            for b, cb in other.terms.items():
                w = a + b
                v = out.get(w, ZERO) + ca * cb
                if v:
                    out[w] = v
                else:
                    out.pop(w, None)
        res = FreeElement()
        res.terms = out
        return res

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FreeElement):
            return NotImplemented
        return self.terms == other.terms

    def __repr__(self) -> str:
        parts = [f"({c.pretty()})*{''.join(map(str, w))}" for w, c in sorted(self.terms.items())]
        return "FreeElement(" + " + ".join(parts) + ")" if parts else "FreeElement(0)"


def _content(word: FreeWord, n: int) -> RootVec:
    out = [0] * n
    for i in word:
        out[i - 1] += 1
    return tuple(out)


def free_commutator(rs: RootSystem, x: FreeElement, y: FreeElement) -> FreeElement:
    """[x, y] = xy - q^{<deg x, deg y>} yx for homogeneous x, y."""
    if x.is_zero() or y.is_zero():
        return FreeElement()
    dx, dy = x.degree(rs.rank), y.degree(rs.rank)
    if dx is None or dy is None:
        raise ValueError("q-commutator needs homogeneous arguments")
    return x * y - (y * x).scale(qpow(rs.pairing(dx, dy)))


def serre_element(rs: RootSystem, i: int, j: int) -> FreeElement:
    """(ad_q E_i)^{1 - c_ij}(E_j) fully expanded."""
    if i == j:
        raise ValueError("Serre elements need distinct indices")
    x = FreeElement.letter(j)
    ei = FreeElement.letter(i)
    for _ in range(1 - rs.c(i, j)):
        x = free_commutator(rs, ei, x)
    return x


def _words_of_content(content: RootVec) -> list[FreeWord]:
    letters: list[int] = []
    for k, m in enumerate(content):
        letters += [k + 1] * m
    return sorted(set(permutations(letters))) if len(letters) <= 8 else _multiset_perms(letters)


def _multiset_perms(letters: list[int]) -> list[FreeWord]:
    counts: dict[int, int] = {}
    for x in letters:
        counts[x] = counts.get(x, 0) + 1
    keys = sorted(counts)
    out: list[FreeWord] = []
    cur: list[int] = []

    def rec(left: int) -> None:
        if left == 0:
            out.append(tuple(cur))
            return
        for k in keys:
            if counts[k]:
                counts[k] -= 1
                cur.append(k)
                rec(left - 1)
                cur.pop()
                counts[k] += 1

    rec(len(letters))
    return out


def _word_count(content: RootVec) -> int:
    total = factorial(sum(content))
    for m in content:
        total //= factorial(m)
    return total


class IdealSlice:
    """Semi-echelon basis of the q-Serre ideal in one multidegree."""

    def __init__(self, degree: RootVec):
        self.degree = degree
        # pivot word -> row with coefficient 1 at the pivot (the largest word)
        self.rows: dict[FreeWord, dict[FreeWord, LaurentRational]] = {}

    def _reduce(self, row: dict[FreeWord, LaurentRational]) -> dict[FreeWord, LaurentRational]:
        row = dict(row)
        while row:
            lead = max(row)
            piv = self.rows.get(lead)
            if piv is None:
                return row
            c = row[lead]
            for w, v in piv.items():
                nv = row.get(w, ZERO) - c * v
                if nv:
                    row[w] = nv
                else:
                    row.pop(w, None)
        return row

    def insert(self, row: Mapping[FreeWord, LaurentRational]) -> bool:
        red = self._reduce(dict(row))
        if not red:
            return False
        lead = max(red)
        inv = red[lead].inverse()
        self.rows[lead] = {w: v * inv for w, v in red.items()}
        return True

    def contains(self, x: FreeElement) -> bool:
        return not self._reduce(x.terms)

    @property
    def basis(self) -> list[FreeElement]:
        return [FreeElement(self.rows[k]) for k in sorted(self.rows, reverse=True)]


_SLICES: dict[tuple, IdealSlice] = {}
_LOCK = threading.Lock()


def ideal_slice(rs: RootSystem, degree: Iterable[int], word_cap: int = DEFAULT_WORD_CAP) -> IdealSlice:
    degree = tuple(degree)
    key = (rs.type, degree)
    with _LOCK:
        if key in _SLICES:
            return _SLICES[key]
    if _word_count(degree) > word_cap:
        raise OracleOutOfRange(
            f"oracle out of range: degree {degree} has {_word_count(degree)} words (cap {word_cap})")
    sl = IdealSlice(degree)
    n = rs.rank
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i == j:
                continue
            s = serre_element(rs, i, j)
            sdeg = s.degree(n)
            rest = tuple(a - b for a, b in zip(degree, sdeg))
            if any(x < 0 for x in rest):
                continue
            for w in _words_of_content(rest):
                for t in range(len(w) + 1):
                    u, v = w[:t], w[t:]
                    sl.insert({u + sw + v: c for sw, c in s.terms.items()})
    with _LOCK:
        _SLICES.setdefault(key, sl)
    return _SLICES[key]


def is_zero_mod_serre(rs: RootSystem, x: FreeElement, word_cap: int = DEFAULT_WORD_CAP) -> bool:
    """True iff x lies in the q-Serre ideal."""
    if x.is_zero():
        return True
    n = rs.rank
    out = True
    by_deg: dict[RootVec, dict[FreeWord, LaurentRational]] = {}
    for w, c in x.terms.items():
        by_deg.setdefault(_content(w, n), {})[w] = c
    for deg, terms in sorted(by_deg.items()):
        if not ideal_slice(rs, deg, word_cap).contains(FreeElement(terms)):
            out = False
    return out
