"""Root systems of finite type in simple-root coordinates.

Simple roots follow the Humphreys/Bourbaki numbering.  The invariant form is
normalized so that short roots have squared length 2, hence
``<alpha_i, alpha_i> = 2 * d[i]`` with ``d[i]`` in {1, 2, 3}.
Indices in public signatures are 1-based, matching the usual labels.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

RootVec = tuple[int, ...]

__all__ = [
    "LieType",
    "RootSystem",
    "RootVec",
    "build_root_system",
    "nonneg_combination_exists",
    "parse_type",
]


@dataclass(frozen=True, order=True)
class LieType:
    family: str
    rank: int

    def __post_init__(self) -> None:
        f, n = self.family, self.rank
        if f not in "ABCDEFG" or len(f) != 1:
            raise ValueError(f"unknown family {f!r}")
        ok = {
            "A": n >= 1,
            "B": n >= 2,
            "C": n >= 2,
            "D": n >= 3,
            "E": n in (6, 7, 8),
            "F": n == 4,
            "G": n == 2,
        }[f]
        if not ok:
            raise ValueError(f"invalid rank {n} for family {f}")

    def __str__(self) -> str:
        return f"{self.family}{self.rank}"


def parse_type(text: str) -> LieType:
    """Read labels such as ``B3`` or ``E6``."""
    text = text.strip().upper()
    if len(text) < 2 or not text[1:].isdigit():
        raise ValueError(f"cannot parse Lie type {text!r}")
    return LieType(text[0], int(text[1:]))


def _edges(t: LieType) -> list[tuple[int, int]]:
    n = t.rank
    if t.family in "ABC":
        return [(i, i + 1) for i in range(1, n)]
    if t.family == "D":
        return [(i, i + 1) for i in range(1, n - 1)] + [(n - 2, n)]
    if t.family == "E":
        return [(1, 3), (3, 4), (4, 5), (2, 4)] + [(k, k + 1) for k in range(5, n)]
    if t.family == "F":
        return [(1, 2), (2, 3), (3, 4)]
    return [(1, 2)]


def _half_norms(t: LieType) -> tuple[int, ...]:
    n = t.rank
    if t.family == "B":
        return tuple([2] * (n - 1) + [1])
    if t.family == "C":
        return tuple([1] * (n - 1) + [2])
    if t.family == "F":
        return (2, 2, 1, 1)
    if t.family == "G":
        return (1, 3)
    return tuple([1] * n)


@dataclass(frozen=True)
class RootSystem:
    """Cartan data and the positive roots of a finite root system."""

    type: LieType
    cartan: tuple[tuple[int, ...], ...]
    d: tuple[int, ...]
    form: tuple[tuple[int, ...], ...]
    positive_roots: tuple[RootVec, ...]
    theta: RootVec
    cmax: int
    _index: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def rank(self) -> int:
        return self.type.rank

    def simple(self, i: int) -> RootVec:
        return tuple(1 if k == i - 1 else 0 for k in range(self.rank))

    def c(self, i: int, j: int) -> int:
        """Cartan entry c_ij = 2<a_i, a_j>/<a_i, a_i> (1-based)."""
        return self.cartan[i - 1][j - 1]

    def pairing(self, a: RootVec, b: RootVec) -> int:
        if len(a) != self.rank or len(b) != self.rank:
            raise ValueError("dimension mismatch")
        f = self.form
        total = 0
        for x, ax in enumerate(a):
            if ax:
                row = f[x]
                for y, by in enumerate(b):
                    if by:
                        total += ax * by * row[y]
        return total

    def norm(self, a: RootVec) -> int:
        return self.pairing(a, a)

    def reflect(self, i: int, v: RootVec) -> RootVec:
        """s_i(v) = v - <a_i^vee, v> a_i."""
        coef = sum(self.cartan[i - 1][k] * v[k] for k in range(self.rank))
        out = list(v)
        out[i - 1] -= coef
        return tuple(out)

    def is_root(self, v: RootVec) -> bool:
        if v in self._index:
            return True
        return tuple(-x for x in v) in self._index

    def is_positive(self, v: RootVec) -> bool:
        return any(x > 0 for x in v) and all(x >= 0 for x in v)

    def root_index(self, v: RootVec) -> int:
        return self._index[v]

    def long_norm(self) -> int:
        return 2 * max(self.d)

    def short_count(self) -> tuple[int, int]:
        """Number of short and long positive roots."""
        short = sum(1 for r in self.positive_roots if self.norm(r) == 2)
        return short, len(self.positive_roots) - short

    def edges(self) -> list[tuple[int, int]]:
        return [(i, j) for i in range(1, self.rank + 1) for j in range(i + 1, self.rank + 1)
                if self.cartan[i - 1][j - 1] != 0]


@lru_cache(maxsize=None)
def build_root_system(t: LieType | str) -> RootSystem:
    if isinstance(t, str):
        t = parse_type(t)
    if t.family == "D" and t.rank == 3:
        t = LieType("A", 3)
    n = t.rank
    d = _half_norms(t)
    form = [[0] * n for _ in range(n)]
    for i in range(n):
        form[i][i] = 2 * d[i]
    for a, b in _edges(t):
        form[a - 1][b - 1] = form[b - 1][a - 1] = -max(d[a - 1], d[b - 1])
    cartan = tuple(tuple(2 * form[i][j] // form[i][i] for j in range(n)) for i in range(n))
    form_t = tuple(tuple(r) for r in form)

    simple = [tuple(1 if k == i else 0 for k in range(n)) for i in range(n)]
    seen = set(simple)
    frontier = list(simple)
    while frontier:
        nxt = []
        for v in frontier:
            for i in range(n):
                coef = sum(cartan[i][k] * v[k] for k in range(n))
                w = list(v)
                w[i] -= coef
                w = tuple(w)
                if all(x >= 0 for x in w) and any(w) and w not in seen:
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    roots = tuple(sorted(seen, key=lambda r: (sum(r), tuple(-x for x in r))))
    theta = max(roots, key=sum)
    rs = RootSystem(t, cartan, d, form_t, roots, theta, max(theta))
    rs._index.update({r: k for k, r in enumerate(roots)})
    return rs


def nonneg_combination_exists(roots: list[RootVec] | tuple[RootVec, ...], goal: RootVec) -> bool:
    """True iff ``goal`` is a sum of elements of ``roots`` with repetition."""
    goal = tuple(goal)
    if any(x < 0 for x in goal):
        return False
    if not any(goal):
        return True
    cands = sorted({tuple(r) for r in roots
                    if any(r) and all(0 <= x <= g for x, g in zip(r, goal))}, reverse=True)
    memo: dict[tuple[int, RootVec], bool] = {}

    def search(idx: int, left: RootVec) -> bool:
        if not any(left):
            return True
        if idx == len(cands):
            return False
        key = (idx, left)
        if key in memo:
            return memo[key]
        r = cands[idx]
        bound = min(g // c for g, c in zip(left, r) if c > 0)
        found = False
        for m in range(bound, -1, -1):
            if search(idx + 1, tuple(g - m * c for g, c in zip(left, r))):
                found = True
                break
        memo[key] = found
        return found

    return search(0, goal)
