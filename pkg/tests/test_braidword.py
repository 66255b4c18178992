from __future__ import annotations

import pytest

from qnilp.braidword import bracket, jantzen_shortcut, leaf, lusztig_expand, nested_chain, to_free
from qnilp.cartan import build_root_system
from qnilp.gamma import enumerate_weyl
from qnilp.qscalar import ONE, qint, qpow
from qnilp.qschubert import host_word
from qnilp.qserre import FreeElement, is_zero_mod_serre
from qnilp.weyl import from_word, identity


def test_identity_is_a_leaf():
    rs = build_root_system("A3")
    assert lusztig_expand(rs, identity(rs), 2) == leaf(rs, 2)
    assert jantzen_shortcut(rs, identity(rs), 2) == 2


def test_double_bond_example():
    rs = build_root_system("B3")
    expr = lusztig_expand(rs, from_word(rs, (3,)), 2)
    want = bracket(leaf(rs, 3), nested_chain(rs, [3, 2]), qint(2).inverse())
    assert expr == want
    assert str(expr) == "(q / (q^2 + 1))*[E3, E[3,2]]"


def test_f4_position_nine():
    rs = build_root_system("F4")
    hw = host_word(rs)
    expr = lusztig_expand(rs, from_word(rs, hw[:8]), hw[8])
    assert expr == nested_chain(rs, [1, 2, 3, 3]).scaled(qint(2).inverse())


@pytest.mark.parametrize("t,positions", [("F4", {1: 1, 5: 2, 20: 3, 24: 4}), ("E6", {7: 4})])
def test_jantzen_positions(t, positions):
    rs = build_root_system(t)
    hw = host_word(rs)
    for pos, k in positions.items():
        w = from_word(rs, hw[: pos - 1])
        assert jantzen_shortcut(rs, w, hw[pos - 1]) == k


def test_to_free_examples():
    rs = build_root_system("A2")
    assert to_free(rs, leaf(rs, 1)) == FreeElement.letter(1)
    got = to_free(rs, nested_chain(rs, [1, 2]))
    assert got == FreeElement({(1, 2): ONE, (2, 1): -qpow(-1)})
    b3 = build_root_system("B3")
    x = to_free(b3, lusztig_expand(b3, from_word(b3, (3,)), 2))
    assert len(x.terms) == 3
    assert x.terms[(3, 3, 2)] == qint(2).inverse()


@pytest.mark.parametrize("t", ["A3", "B3", "C3", "G2"])
def test_root_vectors_have_the_right_degree_and_are_nonzero(t):
    rs = build_root_system(t)
    for w in enumerate_weyl(rs):
        if w.length() > 4:
            continue
        for j in range(1, rs.rank + 1):
            img = w.act(rs.simple(j))
            if any(x < 0 for x in img):
                with pytest.raises(ValueError):
                    lusztig_expand(rs, w, j)
                continue
            expr = lusztig_expand(rs, w, j)
            assert expr.degree == img
            free = to_free(rs, expr)
            assert free.degree(rs.rank) == img
            assert not is_zero_mod_serre(rs, free)
            k = jantzen_shortcut(rs, w, j)
            if k is not None:
                assert is_zero_mod_serre(rs, free - FreeElement.letter(k))
