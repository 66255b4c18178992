"""Root vectors T_w(E_j) as nested q-commutators of Chevalley generators.

The recursion reduces the length of ``w`` at each step:

* if ``w s_j`` has a second right descent ``p``, the braid relation in the
  rank-two parabolic generated by ``s_j, s_p`` turns ``E_j`` into another
  generator ``E_k`` and strictly shortens ``w``;
* otherwise the smallest right descent ``k`` of ``w`` is split off and
  ``T_{s_k}(E_j)`` (or ``T_{s_j s_k}(E_j)``) is written as a bracket.

Ties are broken by the smallest index so the output is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, TypeVar

from .cartan import RootSystem, RootVec, build_root_system
from .qscalar import ONE, LaurentRational, qfact, qint
from .qserre import FreeElement, free_commutator
from .weyl import WeylElement, dihedral_order, from_word, w0ab

__all__ = [
    "NestedExpr",
    "bracket",
    "jantzen_shortcut",
    "leaf",
    "lusztig_expand",
    "nested_chain",
    "to_free",
]

T = TypeVar("T")


@dataclass(frozen=True)
class NestedExpr:
    """Scalar times either a leaf E_i or a q-commutator of two subtrees."""

    index: int | None
    left: NestedExpr | None
    right: NestedExpr | None
    scale: LaurentRational
    degree: RootVec = field(compare=False)

    @property
    def is_leaf(self) -> bool:
        return self.index is not None

    def scaled(self, c: LaurentRational) -> NestedExpr:
        if not c:
            raise ValueError("scale must be nonzero")
        return NestedExpr(self.index, self.left, self.right, self.scale * c, self.degree)

    def fold(self, on_leaf: Callable[[int], T], on_bracket: Callable[[T, T], T],
             on_scale: Callable[[T, LaurentRational], T]) -> T:
        if self.is_leaf:
            val = on_leaf(self.index)
        else:
            val = on_bracket(self.left.fold(on_leaf, on_bracket, on_scale),
                             self.right.fold(on_leaf, on_bracket, on_scale))
        if self.scale != ONE:
            val = on_scale(val, self.scale)
        return val

    def leaves(self) -> list[int]:
        if self.is_leaf:
            return [self.index]
        return self.left.leaves() + self.right.leaves()

    def _chain(self) -> list[int] | None:
        """Leaves of a scale-free left-nested chain, else None."""
        if self.is_leaf:
            return [self.index]
        if self.right.is_leaf and self.left.scale == ONE and self.right.scale == ONE:
            head = self.left._chain()
            if head is not None:
                return head + [self.right.index]
        return None

    def _body(self) -> str:
        chain = NestedExpr(self.index, self.left, self.right, ONE, self.degree)._chain()
        if chain is not None:
            if len(chain) == 1:
                return f"E{chain[0]}"
            return "E[" + ",".join(map(str, chain)) + "]"
        return f"[{self.left}, {self.right}]"

    def __str__(self) -> str:
        body = self._body()
        if self.scale == ONE:
            return body
        return f"({self.scale.pretty()})*{body}"


def leaf(rs: RootSystem, i: int) -> NestedExpr:
    return NestedExpr(i, None, None, ONE, rs.simple(i))


def bracket(x: NestedExpr, y: NestedExpr, scale: LaurentRational = ONE) -> NestedExpr:
    deg = tuple(a + b for a, b in zip(x.degree, y.degree))
    return NestedExpr(None, x, y, scale, deg)


def nested_chain(rs: RootSystem, indices: list[int] | tuple[int, ...]) -> NestedExpr:
    """E_{i_1,...,i_m} = [[...[E_{i_1}, E_{i_2}], ...], E_{i_m}]."""
    expr = leaf(rs, indices[0])
    for i in indices[1:]:
        expr = bracket(expr, leaf(rs, i))
    return expr


def jantzen_shortcut(rs: RootSystem, w: WeylElement, j: int) -> int | None:
    """k with w(alpha_j) = alpha_k, if any (then T_w(E_j) = E_k)."""
    img = w.act(rs.simple(j))
    if sum(img) == 1 and all(x >= 0 for x in img):
        return img.index(1) + 1
    return None


def _g2_table(rs: RootSystem, w: WeylElement, j: int, k: int) -> NestedExpr:
    """Closed forms in G2 when s_j s_k has order 6 and ws_j has one descent."""
    length = w.length()
    inv2 = qint(2).inverse()
    inv3f = qfact(3).inverse()
    e = lambda *idx: nested_chain(rs, list(idx))  # noqa: E731
    ek, ej = leaf(rs, k), leaf(rs, j)
    if rs.c(k, j) == -1:
        # k long, j short
        table = {
            1: e(k, j),
            2: bracket(ej, e(j, k), inv2),
            3: e(k, j, j).scaled(inv2),
            4: e(j, k),
        }
    else:
        # k short, j long
        table = {
            1: bracket(ek, bracket(ek, e(k, j)), inv3f),
            2: bracket(e(j, k), e(j, k, k), inv3f),
            3: bracket(bracket(ek, e(k, j)), e(k, j), inv3f),
            4: e(j, k, k, k).scaled(inv3f),
        }
    expected = [k if t % 2 == 0 else j for t in range(length)][::-1]
    if length not in table or w != from_word(rs, expected):
        raise AssertionError(f"unexpected G2 case w={w.reduced_word()}, j={j}")
    return table[length]


def lusztig_expand(rs: RootSystem | str, w: WeylElement, j: int) -> NestedExpr:
    """T_w(E_j) for w(alpha_j) > 0 as a scalar-weighted bracket tree."""
    if not isinstance(rs, RootSystem):
        rs = build_root_system(rs)
    return _expand(rs, w.cols, j)


@lru_cache(maxsize=200000)
def _expand_cached(rs: RootSystem, cols: tuple, j: int) -> NestedExpr:
    return _expand_impl(rs, WeylElement(rs, cols), j)


def _expand(rs: RootSystem, cols: tuple, j: int) -> NestedExpr:
    return _expand_cached(rs, cols, j)


def _expand_impl(rs: RootSystem, w: WeylElement, j: int) -> NestedExpr:
    img = w.act(rs.simple(j))
    if not rs.is_positive(img):
        raise ValueError(f"w(alpha_{j}) is not positive")
    if w.is_identity():
        return leaf(rs, j)
    v = w.right_mul_simple(j)
    others = sorted(p for p in v.right_descents() if p != j)
    if others:
        p = others[0]
        u = w0ab(rs, j, p)
        new_w = v * u
        k = jantzen_shortcut(rs, u.right_mul_simple(j), j)
        assert k is not None
        return _expand(rs, new_w.cols, k)
    k = min(w.right_descents())
    a = rs.c(k, j)
    wk = w.right_mul_simple(k)
    if a == -1:
        if j not in wk.right_descents():
            return bracket(_expand(rs, wk.cols, k), _expand(rs, wk.cols, j))
        if dihedral_order(rs, j, k) == 4:
            wkj = wk.right_mul_simple(j)
            return bracket(_expand(rs, wkj.cols, j), _expand(rs, wkj.cols, k))
        return _g2_table(rs, w, j, k)
    if a == -2:
        inv2 = qint(2).inverse()
        if j not in wk.right_descents():
            xk = _expand(rs, wk.cols, k)
            return bracket(xk, bracket(xk, _expand(rs, wk.cols, j)), inv2)
        wkj = wk.right_mul_simple(j)
        xj, xk = _expand(rs, wkj.cols, j), _expand(rs, wkj.cols, k)
        return bracket(bracket(xj, xk), xk, inv2)
    if a == -3:
        return _g2_table(rs, w, j, k)
    raise AssertionError(f"unreachable Cartan entry {a}")


def to_free(rs: RootSystem, expr: NestedExpr) -> FreeElement:
    """Expand a bracket tree into the free algebra on E_1..E_n."""
    return expr.fold(FreeElement.letter,
                     lambda x, y: free_commutator(rs, x, y),
                     lambda x, c: x.scale(c))


def root_vector_chain(rs: RootSystem, word: tuple[int, ...]) -> list[NestedExpr]:
    """Nested expressions of all root vectors T_{s_{i_1}...s_{i_{k-1}}}(E_{i_k})."""
    out = []
    prefix = from_word(rs, ())
    for i in word:
        out.append(lusztig_expand(rs, prefix, i))
        prefix = prefix.right_mul_simple(i)
    return out


