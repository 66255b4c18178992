from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qnilp.cartan import build_root_system
from qnilp.cli import load_elements, parse_element, resolve_triple
from qnilp.gamma import (
    GammaTriple,
    chi,
    covered_by_L,
    covered_by_R,
    covers_L,
    covers_R,
    dual,
    enumerate_gamma,
    enumerate_weyl,
    equivalence_class,
    gamma_cardinality,
    in_gamma,
    is_L_reduction,
    is_R_reduction,
    is_kR_reduction,
    minimal_kind,
    nilpotency,
    nilpotency_report,
    orthogonality_holds,
    reduce_pipeline,
    reduce_to_minimal,
    second_stage,
    triple_from_word,
)
from qnilp.weyl import (
    BigrassmannianParams,
    build_bigrassmannian,
    enumerate_bigrassmannian,
    longest_element,
    w0ab,
)


def _brute_gamma(rs):
    out = set()
    for w in enumerate_weyl(rs):
        for i in range(1, rs.rank + 1):
            for j in range(1, rs.rank + 1):
                v = w.left_mul_simple(i).right_mul_simple(j)
                if v.length() == w.length() - 2:
                    out.add((w, i, j))
    return out


@pytest.mark.parametrize("t", ["A2", "A3", "B2", "B3", "C3", "G2"])
def test_cardinality_formula_matches_brute_force(t):
    rs = build_root_system(t)
    brute = _brute_gamma(rs)
    assert gamma_cardinality(rs) == len(brute)
    assert {(x.w, x.i, x.j) for x in enumerate_gamma(rs)} == brute


def test_cardinality_values():
    assert gamma_cardinality(build_root_system("A2")) == 4
    assert gamma_cardinality(build_root_system("F4")) == 4416
    assert gamma_cardinality(build_root_system("E6")) == 453600


def test_dual_and_chi():
    g2 = build_root_system("G2")
    x = resolve_triple(g2, "word 2,1")
    assert chi(g2, x).as_tuple() == (6, 2, 3)
    assert dual(dual(x)) == x
    a2 = build_root_system("A2")
    s = triple_from_word(a2, (1, 2, 1), 1, 1)
    assert dual(s) == s
    f4 = build_root_system("F4")
    assert chi(f4, resolve_triple(f4, "kappa4")).as_tuple() == (4, 2, -2)


@pytest.mark.parametrize("t", ["B2", "G2"])
def test_l_and_r_are_exchanged_by_duality(t):
    rs = build_root_system(t)
    gamma = enumerate_gamma(rs)
    for x in gamma:
        for y in gamma:
            assert is_L_reduction(x, y) == is_R_reduction(dual(x), dual(y))
        lx = {s.target for s in covers_L(rs, x)}
        assert lx == {dual(s.target) for s in covers_R(rs, dual(x))}


def test_cover_examples():
    b2 = build_root_system("B2")
    w0 = longest_element(b2)
    top = GammaTriple(w0, 1, 2)
    assert top.is_valid()
    # the longest element of B2 is already of the form w0(p,k): nothing covers down from it
    assert covers_L(b2, top) == [] and covers_R(b2, top) == []
    assert minimal_kind(b2, GammaTriple(w0, 1, 2)) == "dihedral"
    a3 = build_root_system("A3")
    for x in enumerate_gamma(a3):
        ws = x.w.right_mul_simple(x.j)
        if len(ws.left_descents()) == 1:
            assert covers_L(a3, x) == []
        for s in covers_L(a3, x) + covers_R(a3, x):
            assert s.is_valid() and s.target.is_valid()
            assert s.target.w.length() < x.w.length()


def test_dihedral_terminals():
    g2 = build_root_system("G2")
    w0 = longest_element(g2)
    assert not in_gamma(g2, w0, 1, 1)
    x = GammaTriple(w0, 1, 2)
    y, chain = reduce_to_minimal(g2, x)
    assert y == x and chain == []
    assert nilpotency(g2, x) == 4
    a2 = build_root_system("A2")
    w0 = longest_element(a2)
    assert not in_gamma(a2, w0, 1, 2)
    x = GammaTriple(w0, 1, 1)
    assert minimal_kind(a2, x) == "dihedral"
    assert nilpotency(a2, x) == 2


@pytest.mark.parametrize("t", ["A3", "B3", "G2"])
def test_minimal_elements_are_exactly_the_classified_ones(t):
    rs = build_root_system(t)
    for x in enumerate_gamma(rs):
        has_cover = bool(covers_L(rs, x) or covers_R(rs, x))
        assert has_cover == (minimal_kind(rs, x) is None)


def test_second_stage_first_move_in_bc():
    rs = build_root_system("B5")
    x = resolve_triple(rs, "wparams 0,1,1,2,1")
    y, chain = second_stage(rs, x)
    step = chain[0]
    assert (step.kind, step.index) == ("kR", 1) and step.is_valid()
    v = GammaTriple(build_bigrassmannian(rs, BigrassmannianParams(1, 1, 1, 1, 1)), 3, 3)
    assert is_kR_reduction(x, v, 1)
    assert v in [s.target for s in chain]
    assert orthogonality_holds(rs, y.w) or minimal_kind(rs, y) == "dihedral"


@pytest.mark.parametrize("t", ["B4", "B5", "C4", "C6"])
def test_orthogonal_element_in_bc(t):
    rs = build_root_system(t)
    n = rs.rank
    x = resolve_triple(rs, f"wparams 0,0,1,0,{n - 1}")
    assert orthogonality_holds(rs, x.w)
    assert second_stage(rs, x) == (x, [])


def test_second_stage_rejects_non_bigrassmannian():
    rs = build_root_system("A3")
    x = triple_from_word(rs, (1, 3, 2, 1, 3), 1, 1)
    with pytest.raises(ValueError):
        second_stage(rs, x)


def test_equivalence_class_examples():
    f4 = build_root_system("F4")
    cls = equivalence_class(f4, resolve_triple(f4, "kappa1"))
    assert resolve_triple(f4, "word 2,3") in cls.members and not cls.truncated
    e6 = build_root_system("E6")
    cls = equivalence_class(e6, resolve_triple(e6, "nu15"))
    assert resolve_triple(e6, "nu15^-1") in cls.members
    small = equivalence_class(e6, resolve_triple(e6, "nu15"), node_budget=5)
    assert small.truncated and len(small.members) == 5


@pytest.mark.parametrize("t", ["A3", "B3", "C3", "G2"])
def test_chi_constant_on_classes(t):
    rs = build_root_system(t)
    left = set(enumerate_gamma(rs))
    while left:
        x = left.pop()
        members = equivalence_class(rs, x).members
        assert len({chi(rs, y) for y in members}) == 1
        left -= members


@pytest.mark.parametrize("t", ["A3", "B3", "C3", "B4", "D4"])
def test_index_preserved_by_every_cover(engine, t):
    rs = build_root_system(t)
    for x in enumerate_gamma(rs):
        for s in covers_L(rs, x) + covers_R(rs, x):
            assert engine.direct(rs, x) == engine.direct(rs, s.target)
        for s in covered_by_L(rs, x) + covered_by_R(rs, x):
            assert s.target == x


@pytest.mark.parametrize("t", ["A3", "B3", "C3", "G2", "B4", "D4"])
def test_pipeline_agrees_with_direct_computation(engine, t):
    rs = build_root_system(t)
    for x in enumerate_gamma(rs):
        rep = nilpotency_report(rs, x, engine)
        assert rep.n == engine.direct(rs, x)
        assert rep.n <= rs.cmax + 1
        assert all(s.is_valid() for s in rep.chain)


def test_pipeline_examples(engine):
    c3 = build_root_system("C3")
    assert nilpotency(c3, resolve_triple(c3, "wparams 0,1,2,0,0"), engine) == 3
    b4 = build_root_system("B4")
    rep = nilpotency_report(b4, resolve_triple(b4, "wparams 0,0,2,0,2"), engine)
    assert (rep.n, rep.chi.as_tuple()) == (3, (4, 4, -2))
    g2 = build_root_system("G2")
    assert nilpotency(g2, resolve_triple(g2, "word 1,2,1,2"), engine) == 4
    f4 = build_root_system("F4")
    assert nilpotency(f4, resolve_triple(f4, "kappa4"), engine) == 3
    e6 = build_root_system("E6")
    assert nilpotency(e6, resolve_triple(e6, "nu9"), engine) == 4


def test_pipeline_kinds():
    a2 = build_root_system("A2")
    assert reduce_pipeline(a2, triple_from_word(a2, (1, 2), 1, 2)).kind == "shortcut"
    g2 = build_root_system("G2")
    assert reduce_pipeline(g2, GammaTriple(longest_element(g2), 1, 2)).kind == "dihedral"
    with pytest.raises(ValueError):
        reduce_pipeline(a2, triple_from_word(a2, (1,), 1, 1))


def test_dual_invariance_on_simply_laced_types(engine):
    a3 = build_root_system("A3")
    for x in enumerate_gamma(a3):
        assert nilpotency(a3, x, engine) == nilpotency(a3, dual(x), engine)
        assert chi(a3, x) == chi(a3, dual(x))
    e6 = build_root_system("E6")
    for name in load_elements("E6"):
        x = resolve_triple(e6, name)
        assert nilpotency(e6, x, engine) == nilpotency(e6, dual(x), engine)
        assert chi(e6, x) == chi(e6, dual(x))


@given(st.data())
def test_dual_invariance_d4_samples(engine, data):
    rs = build_root_system("D4")
    gamma = _d4_gamma()
    x = data.draw(st.sampled_from(gamma))
    assert nilpotency(rs, x, engine) == nilpotency(rs, dual(x), engine)
    assert chi(rs, x) == chi(rs, dual(x))


_D4: list[GammaTriple] = []


def _d4_gamma() -> list[GammaTriple]:
    if not _D4:
        _D4.extend(enumerate_gamma(build_root_system("D4")))
    return _D4


def _w(rs, text):
    return parse_element(rs, "wparams " + text)


ORTHOGONAL_SMALL = {
    "A2": ["0,1,0,2,0", "0,2,0,1,0"],
    "A3": ["0,2,0,2,0"],
    "B2": ["0,0,1,1,0", "0,1,1,0,0", "0,0,1,0,1", "0,0,2,0,0"],
    "B3": ["0,0,2,1,0", "0,1,2,0,0", "0,0,1,0,2", "0,0,2,0,1", "0,1,1,1,0"],
    "D4": ["0,0,4,0,0,+", "0,0,1,0,3,+", "0,0,2,0,2,+", "0,1,1,1,1,+", "0,1,2,1,0,+"],
}


def _orthogonal_list(t: str) -> list[str]:
    fam, n = t[0], int(t[1:])
    if fam == "C" and n <= 3:
        return ORTHOGONAL_SMALL["B" + t[1:]]
    if t in ORTHOGONAL_SMALL:
        return ORTHOGONAL_SMALL[t]
    if fam == "A":
        return []
    base = [f"0,0,1,0,{n - 1}", f"0,0,2,0,{n - 2}", f"0,1,1,1,{n - 3}", f"0,1,2,1,{n - 4}"]
    return [b + ",+" for b in base] if fam == "D" else base


@pytest.mark.parametrize("t", ["A2", "A3", "A4", "A5", "A6", "B2", "B3", "B4", "B5", "B6",
                               "C2", "C3", "C4", "C5", "C6", "D4", "D5", "D6"])
def test_orthogonal_bigrassmannians_classical(t):
    rs = build_root_system(t)
    got = {w for w in enumerate_bigrassmannian(rs) if orthogonality_holds(rs, w)}
    assert got == {_w(rs, p) for p in _orthogonal_list(t)}


@pytest.mark.parametrize("t,count", [("G2", 8), ("F4", 34), ("E6", 20)])
def test_orthogonal_bigrassmannian_counts(t, count):
    rs = build_root_system(t)
    assert sum(1 for w in enumerate_bigrassmannian(rs) if orthogonality_holds(rs, w)) == count


def test_w0ab_is_dihedral_minimal():
    rs = build_root_system("F4")
    x = GammaTriple(w0ab(rs, 2, 3), 2, 3)
    assert x.is_valid() and minimal_kind(rs, x) == "dihedral"
    assert covers_L(rs, x) == [] and covers_R(rs, x) == []
