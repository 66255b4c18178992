"""PBW engine for quantum Schubert cell algebras.

Root vectors X_1..X_N of a reduced word are ordered generators; an ordered
monomial is stored as the sorted tuple of its positions (with repetition).
A relation for the pair a < b is the ordered expansion of
``[X_a, X_b] = X_a X_b - q^{<beta_a, beta_b>} X_b X_a``; straightening uses

    X_b X_a = q^{-<beta_a, beta_b>} (X_a X_b - [X_a, X_b])

to move the larger position to the right.  Missing relations surface as
:class:`Blocked` so that callers can retry once more of the table is known.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from .braidword import NestedExpr, leaf, lusztig_expand, root_vector_chain
from .cartan import RootSystem, RootVec, build_root_system, nonneg_combination_exists
from .qscalar import ONE, ZERO, LaurentRational, hat, parse, qpow
from .weyl import WeylElement, is_reduced, longest_element, radical_roots

__all__ = [
    "Blocked",
    "IncompletePresentation",
    "PBWElement",
    "Presentation",
    "SeedRelation",
    "StepCapExceeded",
    "adq_power",
    "complete_relations",
    "host_word",
    "load_relation_cache",
    "new_presentation",
    "nilpotency_in_w0",
    "nilpotency_index",
    "nilpotency_pair",
    "present_word",
    "parse_seed_line",
    "q_commutator",
    "run_L",
    "run_R",
    "seeds_from_nested",
    "write_relation_cache",
]

Mono = tuple[int, ...]
Terms = dict[Mono, LaurentRational]

DEFAULT_STEP_CAP = 10_000_000
# straightening memo entries kept before the memo is dropped; bounds memory on E8
DEFAULT_CACHE_LIMIT = 500_000


class Blocked(Exception):
    """A straightening step needs a relation that is not known yet."""

    def __init__(self, pair: tuple[int, int]):
        super().__init__(f"relation unknown for pair {pair}")
        self.pair = pair


class StepCapExceeded(RuntimeError):
    pass


class IncompletePresentation(RuntimeError):
    pass


@dataclass(frozen=True)
class SeedRelation:
    """X_m = c * [X_r, X_s] with r < s."""

    m: int
    r: int
    s: int
    c: LaurentRational

    def __str__(self) -> str:
        return f"X{self.m} = ({self.c}) * [X{self.r}, X{self.s}]"


def parse_seed_line(line: str) -> SeedRelation:
    """Read ``X<m> = (c) * [X<r>, X<s>]``; a bare ``X<m> = [X<r>, X<s>]`` means c = 1."""
    import re

    m = re.fullmatch(r"\s*X(\d+)\s*=\s*(?:\((.*)\)\s*\*\s*)?\[\s*X(\d+)\s*,\s*X(\d+)\s*\]\s*", line)
    if m is None:
        raise ValueError(f"cannot parse seed line {line!r}")
    c = parse(m.group(2)) if m.group(2) else ONE
    return SeedRelation(int(m.group(1)), int(m.group(3)), int(m.group(4)), c)


class PBWElement:
    """Sparse combination of ordered monomials (tuples of sorted positions)."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Mono, LaurentRational] | None = None):
        self.terms: Terms = {k: v for k, v in (terms or {}).items() if v}

    @classmethod
    def generator(cls, a: int) -> PBWElement:
        return cls({(a,): ONE})

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: PBWElement) -> PBWElement:
        out = dict(self.terms)
        _add_into(out, other.terms, ONE)
        return PBWElement._wrap(out)

    def __sub__(self, other: PBWElement) -> PBWElement:
        out = dict(self.terms)
        _add_into(out, other.terms, -ONE)
        return PBWElement._wrap(out)

    def scale(self, c: LaurentRational | int) -> PBWElement:
        if isinstance(c, int):
            c = LaurentRational(c)
        if not c:
            return PBWElement()
        return PBWElement._wrap({k: v * c for k, v in self.terms.items()})

    @classmethod
    def _wrap(cls, terms: Terms) -> PBWElement:
        obj = object.__new__(cls)
        obj.terms = terms
        return obj

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PBWElement):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset((k, v) for k, v in self.terms.items()))

    def monomial_of_single_generator(self) -> tuple[int, LaurentRational] | None:
        if len(self.terms) == 1:
            (mono, c), = self.terms.items()
            if len(mono) == 1:
                return mono[0], c
        return None

    def format(self, names: Callable[[int], str] = lambda a: f"x{a}") -> str:
        if not self.terms:
            return "0"
        parts = []
        for mono, c in sorted(self.terms.items()):
            factors = []
            k = 0
            while k < len(mono):
                a = mono[k]
                e = 1
                while k + e < len(mono) and mono[k + e] == a:
                    e += 1
                factors.append(names(a) + (f"^{e}" if e > 1 else ""))
                k += e
            coeff = "" if c == ONE else f"({c.pretty()})*"
            parts.append(coeff + "*".join(factors))
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"PBWElement({self.format()})"


def _add_into(acc: Terms, terms: Mapping[Mono, LaurentRational], c: LaurentRational) -> None:
    one = c == ONE
    for k, v in terms.items():
        val = acc.get(k)
        add = v if one else v * c
        if val is None:
            if add:
                acc[k] = add
        else:
            val = val + add
            if val:
                acc[k] = val
            else:
                del acc[k]


def _merge(a: Mono, b: Mono) -> Mono:
    return tuple(sorted(a + b))


class Presentation:
    """Relation table of U_q^+[w] for a fixed reduced word."""

    def __init__(self, rs: RootSystem, word: Sequence[int], step_cap: int = DEFAULT_STEP_CAP):
        self.rs = rs
        self.word = tuple(word)
        self.N = len(self.word)
        self.betas: list[RootVec] = [()] + list(radical_roots(rs, self.word))
        self.relations: dict[tuple[int, int], Terms] = {}
        self.step_cap = step_cap
        self.steps = 0
        self._gen_cache: dict[tuple[Mono, int], Terms] = {}
        self.cache_limit = DEFAULT_CACHE_LIMIT
        self._pair = [[0] * (self.N + 1) for _ in range(self.N + 1)]
        for a in range(1, self.N + 1):
            for b in range(1, self.N + 1):
                self._pair[a][b] = rs.pairing(self.betas[a], self.betas[b])
        self.period = _period(self.word)
        self.lock = threading.Lock()
        self._expr_cache: list[NestedExpr] | None = None

    # -- bookkeeping -----------------------------------------------------------
    def pairing(self, a: int, b: int) -> int:
        return self._pair[a][b]

    def degree_of(self, mono: Mono) -> RootVec:
        out = [0] * self.rs.rank
        for a in mono:
            for k, x in enumerate(self.betas[a]):
                out[k] += x
        return tuple(out)

    def is_known(self, a: int, b: int) -> bool:
        return (a, b) in self.relations

    def relation(self, a: int, b: int) -> PBWElement:
        if (a, b) not in self.relations:
            raise Blocked((a, b))
        return PBWElement._wrap(dict(self.relations[(a, b)]))

    def unknown_pairs(self) -> list[tuple[int, int]]:
        return [(a, b) for a in range(1, self.N + 1) for b in range(a + 1, self.N + 1)
                if (a, b) not in self.relations]

    def is_complete(self) -> bool:
        return len(self.relations) == self.N * (self.N - 1) // 2

    def check_entry(self, a: int, b: int, terms: Mapping[Mono, LaurentRational]) -> None:
        goal = tuple(x + y for x, y in zip(self.betas[a], self.betas[b]))
        for mono in terms:
            if mono and (mono[0] <= a or mono[-1] >= b):
                raise AssertionError(f"relation ({a},{b}) leaves the interval: {mono}")
            if self.degree_of(mono) != goal:
                raise AssertionError(f"relation ({a},{b}) is not homogeneous: {mono}")

    def set_relation(self, a: int, b: int, value: PBWElement | Terms) -> None:
        terms = value.terms if isinstance(value, PBWElement) else value
        terms = {k: v for k, v in terms.items() if v}
        self.check_entry(a, b, terms)
        old = self.relations.get((a, b))
        if old is not None:
            if old != terms:
                raise AssertionError(f"conflicting values for relation ({a},{b})")
            return
        self.relations[(a, b)] = terms

    # -- straightening ---------------------------------------------------------------
    def _mult_gen(self, mono: Mono, b: int) -> Terms:
        """Ordered expansion of (monomial) * X_b."""
        if not mono or mono[-1] <= b:
            return {mono + (b,): ONE}
        key = (mono, b)
        hit = self._gen_cache.get(key)
        if hit is not None:
            return hit
        self.steps += 1
        if self.steps > self.step_cap:
            raise StepCapExceeded(f"straightening exceeded {self.step_cap} rewrites")
        a = mono[-1]
        rel = self.relations.get((b, a))
        if rel is None:
            raise Blocked((b, a))
        head = mono[:-1]
        out: Terms = {}
        # head * X_b * X_a
        for m1, c1 in self._mult_gen(head, b).items():
            for m2, c2 in self._mult_gen(m1, a).items():
                _add_into(out, {m2: c2}, c1)
        # - head * [X_b, X_a]
        if rel:
            _add_into(out, self._mult_mono_terms(head, rel), -ONE)
        factor = qpow(-self._pair[a][b])
        out = {k: v * factor for k, v in out.items()}
        if len(self._gen_cache) >= self.cache_limit:
            self._gen_cache.clear()
        self._gen_cache[key] = out
        return out

    def _mult_mono_mono(self, m1: Mono, m2: Mono) -> Terms:
        cur: Terms = {m1: ONE}
        for b in m2:
            nxt: Terms = {}
            for m, c in cur.items():
                _add_into(nxt, self._mult_gen(m, b), c)
            cur = nxt
        return cur

    def _mult_mono_terms(self, m1: Mono, terms: Mapping[Mono, LaurentRational]) -> Terms:
        out: Terms = {}
        for m2, c2 in terms.items():
            _add_into(out, self._mult_mono_mono(m1, m2), c2)
        return out

    def multiply(self, x: PBWElement, y: PBWElement) -> PBWElement:
        out: Terms = {}
        for m1, c1 in x.terms.items():
            for m2, c2 in y.terms.items():
                _add_into(out, self._mult_mono_mono(m1, m2), c1 * c2)
        return PBWElement._wrap(out)

    def straighten(self, positions: Sequence[int]) -> PBWElement:
        """Ordered expansion of the product X_{p_1} X_{p_2} ... in the given order."""
        cur: Terms = {(): ONE}
        for b in positions:
            if not 1 <= b <= self.N:
                raise ValueError(f"position {b} out of range")
            nxt: Terms = {}
            for m, c in cur.items():
                _add_into(nxt, self._mult_gen(m, b), c)
            cur = nxt
        return PBWElement._wrap(cur)

    def degree(self, x: PBWElement) -> RootVec | None:
        degs = {self.degree_of(m) for m in x.terms}
        return degs.pop() if len(degs) == 1 else None

    def generator(self, a: int) -> PBWElement:
        return PBWElement.generator(a)

    # -- root vectors as bracket trees ------------------------------------------------
    def expressions(self) -> list[NestedExpr]:
        if self._expr_cache is None:
            self._expr_cache = root_vector_chain(self.rs, self.word)
        return self._expr_cache

    def simple_position(self, i: int) -> int | None:
        """Position k with beta_k = alpha_i."""
        target = self.rs.simple(i)
        for k in range(1, self.N + 1):
            if self.betas[k] == target:
                return k
        return None

    def evaluate(self, expr: NestedExpr) -> PBWElement:
        """Value of a bracket tree over E-leaves, with E_i = X at the position of alpha_i."""
        def on_leaf(i: int) -> PBWElement:
            k = self.simple_position(i)
            if k is None:
                raise ValueError(f"alpha_{i} is not a radical root of this word")
            return PBWElement.generator(k)

        return expr.fold(on_leaf, lambda x, y: q_commutator(self, x, y), lambda x, c: x.scale(c))

    def shifted(self, terms: Mapping[Mono, LaurentRational], t: int) -> Terms:
        return {tuple(a + t for a in m): c for m, c in terms.items()}

    def format_relation(self, a: int, b: int) -> str:
        rel = self.relation(a, b)
        return f"[x{a}, x{b}] = {rel.format()}"


def _period(word: tuple[int, ...]) -> int | None:
    n = len(word)
    for t in range(1, n):
        if all(word[k] == word[k + t] for k in range(n - t)):
            return t if t < n else None
    return None


def new_presentation(rs: RootSystem | str, word: Sequence[int], step_cap: int = DEFAULT_STEP_CAP) -> Presentation:
    """Presentation with all LS-zero pairs filled in."""
    if not isinstance(rs, RootSystem):
        rs = build_root_system(rs)
    if not is_reduced(rs, word):
        raise ValueError(f"word {tuple(word)} is not reduced")
    p = Presentation(rs, word, step_cap)
    for a in range(1, p.N + 1):
        for b in range(a + 1, p.N + 1):
            goal = tuple(x + y for x, y in zip(p.betas[a], p.betas[b]))
            if not nonneg_combination_exists(p.betas[a + 1:b], goal):
                p.relations[(a, b)] = {}
    return p


def q_commutator(p: Presentation, x: PBWElement, y: PBWElement) -> PBWElement:
    """[x, y] = xy - q^{<deg x, deg y>} yx for homogeneous x, y."""
    if x.is_zero() or y.is_zero():
        return PBWElement()
    dx, dy = p.degree(x), p.degree(y)
    if dx is None or dy is None:
        raise ValueError("q-commutator needs homogeneous arguments")
    e = p.rs.pairing(dx, dy)
    out = dict(p.multiply(x, y).terms)
    _add_into(out, p.multiply(y, x).terms, -qpow(e))
    return PBWElement._wrap(out)


def _gen(a: int) -> PBWElement:
    return PBWElement.generator(a)


def run_R(p: Presentation, i: int, j: int, r: int, s: int, c: LaurentRational) -> PBWElement:
    """[X_i, X_j] from X_j = c [X_r, X_s] via the q-Jacobi identity.

    [x,[y,z]] = [[x,y],z] - q^{-<y,z>} [[x,z],y] - (q^{<y,z>} - q^{-<y,z>}) [x,z] y
    Raises Blocked when a needed relation is unknown.
    """
    xi, xr, xs = _gen(i), _gen(r), _gen(s)
    e = p.pairing(r, s)
    ir = q_commutator(p, xi, xr)
    is_ = q_commutator(p, xi, xs)
    out = dict(q_commutator(p, ir, xs).terms)
    _add_into(out, q_commutator(p, is_, xr).terms, -qpow(-e))
    _add_into(out, p.multiply(is_, xr).terms, -hat(qpow(e)))
    return PBWElement._wrap(out).scale(c)


def run_L(p: Presentation, i: int, j: int, r: int, s: int, c: LaurentRational) -> PBWElement:
    """[X_i, X_j] from X_i = c [X_r, X_s] via the q-Jacobi identity.

    [[x,y],z] = [x,[y,z]] + q^{-<y,z>} [[x,z],y] + (q^{<y,z>} - q^{-<y,z>}) [x,z] y
    """
    xr, xs, xj = _gen(r), _gen(s), _gen(j)
    e = p.pairing(s, j)
    sj = q_commutator(p, xs, xj)
    rj = q_commutator(p, xr, xj)
    out = dict(q_commutator(p, xr, sj).terms)
    _add_into(out, q_commutator(p, rj, xs).terms, qpow(-e))
    _add_into(out, p.multiply(rj, xs).terms, hat(qpow(e)))
    return PBWElement._wrap(out).scale(c)


# -- seeds -------------------------------------------------------------------------

def _unscaled(expr: NestedExpr) -> NestedExpr:
    return NestedExpr(expr.index, expr.left, expr.right, ONE, expr.degree)


def seeds_from_nested(p: Presentation) -> list[SeedRelation]:
    """Positions whose bracket tree is literally a bracket of two other positions' trees."""
    exprs = p.expressions()
    index: dict[NestedExpr, tuple[int, LaurentRational]] = {}
    for k, e in enumerate(exprs, start=1):
        index.setdefault(_unscaled(e), (k, e.scale))
    for i in range(1, p.rs.rank + 1):
        k = p.simple_position(i)
        if k is not None:
            index.setdefault(leaf(p.rs, i), (k, ONE))
    out = []
    for m, e in enumerate(exprs, start=1):
        if e.is_leaf:
            continue
        left = index.get(_unscaled(e.left))
        right = index.get(_unscaled(e.right))
        if left is None or right is None:
            continue
        (r, sr), (s, ss) = left, right
        # left = (e.left.scale / sr) X_r, right likewise
        c = e.scale * e.left.scale * e.right.scale / (sr * ss)
        if r > s:
            # [X_r, X_s] = -q^{<b_r,b_s>} [X_s, X_r]
            c = -c * qpow(p.pairing(r, s))
            r, s = s, r
        if r < m < s:
            out.append(SeedRelation(m, r, s, c))
    return out


def _register_seed(p: Presentation, seed: SeedRelation) -> bool:
    """Store [X_r, X_s] = (1/c) X_m; returns True if new."""
    if p.is_known(seed.r, seed.s):
        expected = {(seed.m,): seed.c.inverse()}
        if p.relations[(seed.r, seed.s)] != expected:
            raise AssertionError(f"seed {seed} disagrees with the relation table")
        return False
    p.set_relation(seed.r, seed.s, {(seed.m,): seed.c.inverse()})
    return True


@dataclass
class CompletionReport:
    known: int
    total: int
    rounds: int
    unknown: list[tuple[int, int]] = field(default_factory=list)
    seeds: int = 0
    log: list[str] = field(default_factory=list)


def complete_relations(p: Presentation, seeds: Iterable[SeedRelation] = (),
                       mine: bool = True, max_rounds: int = 1000,
                       progress: Callable[[str], None] | None = None) -> CompletionReport:
    """Fixpoint of seed registration, L/R attempts, periodic transport and harvesting."""
    seed_list: list[SeedRelation] = list(seeds)
    if mine:
        seed_list = seeds_from_nested(p) + seed_list
    by_m: dict[int, list[SeedRelation]] = {}
    seen_seeds: dict[tuple[int, int, int], LaurentRational] = {}
    log: list[str] = []

    def add_seed(sd: SeedRelation) -> None:
        key = (sd.m, sd.r, sd.s)
        if not (sd.r < sd.m < sd.s):
            return
        if key in seen_seeds:
            if seen_seeds[key] != sd.c:
                raise AssertionError(f"conflicting seeds for X{sd.m} = c [X{sd.r}, X{sd.s}]: "
                                     f"{seen_seeds[key]} and {sd.c}")
            return
        seen_seeds[key] = sd.c
        by_m.setdefault(sd.m, []).append(sd)
        _register_seed(p, sd)
        t = p.period
        if t:
            k = 1
            while sd.s + k * t <= p.N:
                add_seed(SeedRelation(sd.m + k * t, sd.r + k * t, sd.s + k * t, sd.c))
                k += 1
            k = 1
            while sd.r - k * t >= 1:
                add_seed(SeedRelation(sd.m - k * t, sd.r - k * t, sd.s - k * t, sd.c))
                k += 1

    def store(a: int, b: int, terms: Terms) -> None:
        p.set_relation(a, b, terms)
        single = PBWElement._wrap(terms).monomial_of_single_generator()
        if single is not None:
            m, c = single
            add_seed(SeedRelation(m, a, b, c.inverse()))
        t = p.period
        if t:
            for k in range(1, p.N):
                if b + k * t <= p.N:
                    transport(a + k * t, b + k * t, p.shifted(terms, k * t))
                if a - k * t >= 1:
                    transport(a - k * t, b - k * t, p.shifted(terms, -k * t))

    def transport(a: int, b: int, terms: Terms) -> None:
        if p.is_known(a, b):
            p.set_relation(a, b, terms)  # consistency check
            return
        p.set_relation(a, b, terms)
        single = PBWElement._wrap(terms).monomial_of_single_generator()
        if single is not None:
            m, c = single
            add_seed(SeedRelation(m, a, b, c.inverse()))

    # make the periodic closure of LS-zero entries consistent
    for sd in seed_list:
        add_seed(sd)
    for (a, b), terms in list(p.relations.items()):
        if terms:
            single = PBWElement._wrap(terms).monomial_of_single_generator()
            if single is not None:
                add_seed(SeedRelation(single[0], a, b, single[1].inverse()))

    rounds = 0
    while rounds < max_rounds:
        rounds += 1
        progress_made = False
        pending = sorted(p.unknown_pairs(), key=lambda ab: (ab[1] - ab[0], ab))
        for a, b in pending:
            if p.is_known(a, b):
                continue
            attempts = [("R", sd) for sd in by_m.get(b, ()) if sd.r > a] + \
                       [("L", sd) for sd in by_m.get(a, ()) if sd.s < b] + \
                       [("R", sd) for sd in by_m.get(b, ()) if sd.r <= a] + \
                       [("L", sd) for sd in by_m.get(a, ()) if sd.s >= b]
            for kind, sd in attempts:
                try:
                    if kind == "R":
                        val = run_R(p, a, b, sd.r, sd.s, sd.c)
                    else:
                        val = run_L(p, a, b, sd.r, sd.s, sd.c)
                except Blocked:
                    continue
                store(a, b, val.terms)
                log.append(f"{kind}({a},{b},{sd.r},{sd.s})")
                progress_made = True
                break
        if progress is not None:
            progress(f"round {rounds}: {len(p.relations)} of {p.N * (p.N - 1) // 2} known")
        if not progress_made:
            break
    return CompletionReport(len(p.relations), p.N * (p.N - 1) // 2, rounds,
                            p.unknown_pairs(), len(seen_seeds), log)


def verify_seeds(p: Presentation, seeds: Iterable[SeedRelation]) -> list[SeedRelation]:
    """Seeds whose bracket does not reproduce X_m in the completed table."""
    bad = []
    for sd in seeds:
        val = q_commutator(p, _gen(sd.r), _gen(sd.s)).scale(sd.c)
        if val != _gen(sd.m):
            bad.append(sd)
    return bad


# -- nilpotency -----------------------------------------------------------------------

def adq_power(p: Presentation, a_pos: int, y: PBWElement, k: int) -> PBWElement:
    """(ad_q X_{a_pos})^k (y)."""
    x = _gen(a_pos)
    for _ in range(k):
        if y.is_zero():
            break
        y = q_commutator(p, x, y)
    return y


def nilpotency_pair(p: Presentation, a_pos: int, b_pos: int) -> int:
    """Least k with (ad_q X_a)^k (X_b) = 0 for a < b."""
    if not 1 <= a_pos < b_pos <= p.N:
        raise ValueError("need 1 <= a < b <= N")
    cap = p.rs.cmax + 1
    return _nil_loop(p, a_pos, _gen(b_pos), p.betas[b_pos], p.betas[a_pos + 1:b_pos], cap)


def _nil_loop(p: Presentation, a_pos: int, y: PBWElement, ydeg: RootVec,
              interval: Sequence[RootVec], cap: int) -> int:
    beta = p.betas[a_pos]
    for k in range(1, cap + 2):
        goal = tuple(x + k * b for x, b in zip(ydeg, beta))
        if not nonneg_combination_exists(interval, goal):
            return k
        y = q_commutator(p, _gen(a_pos), y)
        if y.is_zero():
            return k
    raise AssertionError(f"nilpotency index exceeds {cap}")


def nilpotency_in_w0(p: Presentation, i: int, expr: NestedExpr,
                     interval: Sequence[RootVec]) -> int:
    """Least k with (ad_q E_i)^k(Y) = 0 inside a complete longest-element table.

    ``Y`` is given as a bracket tree.  ``interval`` lists the radical roots
    strictly between E_i and Y in a reduced word realizing the pair; the
    combinatorial cutoff is only valid for that interval, not for the host
    word.
    """
    y = p.evaluate(expr)
    a = p.simple_position(i)
    if a is None:
        raise ValueError(f"alpha_{i} missing from the word")
    return _nil_loop(p, a, y, expr.degree, interval, p.rs.cmax + 1)


# -- presentations of other words by transport through a complete table --------------

def _monomials_of_degree(betas: Sequence[RootVec], positions: Sequence[int], goal: RootVec) -> list[Mono]:
    out: list[Mono] = []
    pos = list(positions)

    def rec(idx: int, left: RootVec, acc: list[int]) -> None:
        if not any(left):
            out.append(tuple(sorted(acc)))
            return
        if idx == len(pos):
            return
        b = betas[pos[idx]]
        bound = min((g // c for g, c in zip(left, b) if c > 0), default=0)
        if any(c > 0 and g < 0 for g, c in zip(left, b)):
            bound = 0
        for m in range(bound, -1, -1):
            rec(idx + 1, tuple(g - m * c for g, c in zip(left, b)), acc + [pos[idx]] * m)

    rec(0, goal, [])
    return sorted(set(out))


def _solve(columns: list[Terms], target: Terms) -> list[LaurentRational] | None:
    """Coefficients x with sum x_k columns[k] = target, or None."""
    rows_keys = sorted(set().union(*[set(c) for c in columns], set(target)))
    n = len(columns)
    mat = [[col.get(r, ZERO) for col in columns] + [target.get(r, ZERO)] for r in rows_keys]
    piv_cols = []
    row = 0
    for col in range(n):
        pr = next((k for k in range(row, len(mat)) if mat[k][col]), None)
        if pr is None:
            continue
        mat[row], mat[pr] = mat[pr], mat[row]
        inv = mat[row][col].inverse()
        mat[row] = [x * inv for x in mat[row]]
        for k in range(len(mat)):
            if k != row and mat[k][col]:
                f = mat[k][col]
                mat[k] = [x - f * y for x, y in zip(mat[k], mat[row])]
        piv_cols.append(col)
        row += 1
    for k in range(row, len(mat)):
        if mat[k][n]:
            return None
    sol = [ZERO] * n
    for k, col in enumerate(piv_cols):
        sol[col] = mat[k][n]
    return sol


def present_word(host: Presentation, word: Sequence[int]) -> Presentation:
    """Full presentation of a reduced word, computed inside a complete host table.

    Root vectors of ``word`` are expanded as bracket trees, evaluated in the
    host PBW basis, bracketed there, and the result is re-expressed in the
    ordered monomials of ``word`` by exact linear algebra.
    """
    rs = host.rs
    p = new_presentation(rs, word, host.step_cap)
    vals = [PBWElement()] + [host.evaluate(e) for e in p.expressions()]
    prod_cache: dict[Mono, Terms] = {}

    def expand(mono: Mono) -> Terms:
        if mono not in prod_cache:
            cur = PBWElement({(): ONE})
            for a in mono:
                cur = host.multiply(cur, vals[a])
            prod_cache[mono] = cur.terms
        return prod_cache[mono]

    for a, b in p.unknown_pairs():
        val = q_commutator(host, vals[a], vals[b])
        goal = tuple(x + y for x, y in zip(p.betas[a], p.betas[b]))
        monos = _monomials_of_degree(p.betas, range(a + 1, b), goal)
        sol = _solve([expand(m) for m in monos], val.terms)
        if sol is None:
            raise AssertionError(f"pair ({a},{b}) is not in the span of interval monomials")
        p.set_relation(a, b, {m: c for m, c in zip(monos, sol) if c})
    return p


# -- relation-table cache ------------------------------------------------------------

def write_relation_cache(p: Presentation) -> str:
    lines = [f"type {p.rs.type}", "word " + ",".join(map(str, p.word))]
    for (a, b) in sorted(p.relations):
        terms = p.relations[(a, b)]
        body = "; ".join(
            f"{','.join(map(str, _exponents(m, p.N)))}:{c}" for m, c in sorted(terms.items()))
        lines.append(f"{a} {b} : {body}")
    return "\n".join(lines) + "\n"


def _exponents(mono: Mono, n: int) -> list[int]:
    out = [0] * n
    for a in mono:
        out[a - 1] += 1
    return out


def load_relation_cache(text: str) -> Presentation:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines[0].startswith("type ") or not lines[1].startswith("word "):
        raise ValueError("malformed relation cache header")
    rs = build_root_system(lines[0][5:].strip())
    word = tuple(int(x) for x in lines[1][5:].split(","))
    p = Presentation(rs, word)
    for ln in lines[2:]:
        head, _, body = ln.partition(" : ")
        a, b = (int(x) for x in head.split())
        terms: Terms = {}
        if body.strip():
            for item in body.split("; "):
                exps, _, coeff = item.partition(":")
                mono: list[int] = []
                for k, e in enumerate(exps.split(","), start=1):
                    mono += [k] * int(e)
                terms[tuple(mono)] = parse(coeff)
        p.set_relation(a, b, terms)
    return p


def w0_word_default(rs: RootSystem) -> tuple[int, ...]:
    return longest_element(rs).reduced_word()


def _bipartite_coxeter(rs: RootSystem) -> tuple[int, ...]:
    """Coxeter word listing one colour class of the Dynkin diagram, then the other."""
    n = rs.rank
    colour = {1: 0}
    stack = [1]
    while stack:
        a = stack.pop()
        for b in range(1, n + 1):
            if b not in colour and rs.c(a, b) != 0:
                colour[b] = 1 - colour[a]
                stack.append(b)
    return tuple(sorted(range(1, n + 1), key=lambda i: (colour[i], i)))


def host_word(rs: RootSystem | str) -> tuple[int, ...]:
    """Periodic reduced word for w0 used as the ambient table for every query.

    Exceptional types use a power of a Coxeter word; the classical types use
    the bipartite Coxeter word truncated to the number of positive roots.
    """
    if not isinstance(rs, RootSystem):
        rs = build_root_system(rs)
    n, big_n = rs.rank, len(rs.positive_roots)
    fam = rs.type.family
    if fam == "E" and n == 6:
        c: tuple[int, ...] = (2, 4, 3, 5, 1, 6)
    elif fam in "EFG":
        c = tuple(range(1, n + 1))
    else:
        c = _bipartite_coxeter(rs)
    word = (c * big_n)[:big_n]
    if not is_reduced(rs, word):
        raise AssertionError(f"host word for {rs.type} is not reduced")
    return word


def nilpotency_index(host: Presentation, w: WeylElement, i: int, j: int) -> int:
    """N(w, i, j): least k with (ad_q E_i)^k (T_{w s_j} E_j) = 0.

    ``host`` must be a complete table for a reduced word of w0.  The cutoff
    uses the radical roots strictly between alpha_i and w s_j(alpha_j) in the
    word i, (reduced word of s_i w s_j), j.
    """
    rs = host.rs
    ws = w.right_mul_simple(j)
    v = ws.left_mul_simple(i)
    if v.length() != w.length() - 2:
        raise ValueError("(w, i, j) is not in Gamma(W)")
    expr = lusztig_expand(rs, ws, j)
    interval = [rs.reflect(i, b) for b in radical_roots(rs, v.reduced_word())]
    return nilpotency_in_w0(host, i, expr, interval)


def simple_positions(p: Presentation) -> dict[int, int]:
    return {i: k for i in range(1, p.rs.rank + 1) if (k := p.simple_position(i)) is not None}

