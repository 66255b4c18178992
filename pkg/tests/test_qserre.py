from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qnilp.braidword import lusztig_expand, nested_chain, to_free
from qnilp.cartan import build_root_system
from qnilp.qscalar import ONE, qint, qpow
from qnilp.qserre import (
    FreeElement,
    OracleOutOfRange,
    free_commutator,
    ideal_slice,
    is_zero_mod_serre,
    serre_element,
)
from qnilp.weyl import from_word


def test_serre_element_examples():
    a2 = build_root_system("A2")
    s = serre_element(a2, 1, 2)
    assert s == FreeElement({(1, 1, 2): ONE, (1, 2, 1): -qint(2), (2, 1, 1): ONE})
    a3 = build_root_system("A3")
    assert serre_element(a3, 1, 3) == FreeElement({(1, 3): ONE, (3, 1): -ONE})
    g2 = build_root_system("G2")
    s = serre_element(g2, 1, 2)
    assert s.degree(2) == (4, 1) and len(s.terms) == 5
    with pytest.raises(ValueError):
        serre_element(a2, 1, 1)


def test_zero_tests():
    a3 = build_root_system("A3")
    assert is_zero_mod_serre(a3, serre_element(a3, 1, 2))
    assert is_zero_mod_serre(a3, to_free(a3, nested_chain(a3, [1, 3])))
    assert not is_zero_mod_serre(a3, to_free(a3, nested_chain(a3, [1, 2])))
    b3 = build_root_system("B3")
    x30 = FreeElement.letter(3)
    x20 = to_free(b3, lusztig_expand(b3, from_word(b3, (3, 2, 1)), 3))
    x23 = to_free(b3, lusztig_expand(b3, from_word(b3, (3,)), 2))
    lhs = free_commutator(b3, x30, x20)
    assert is_zero_mod_serre(b3, lhs - x23.scale(qint(2)))


def test_word_cap_refuses():
    rs = build_root_system("E8")
    with pytest.raises(OracleOutOfRange):
        ideal_slice(rs, (1, 2, 3, 4, 3, 2, 1, 1), word_cap=100)


def test_slices_are_cached():
    rs = build_root_system("A2")
    assert ideal_slice(rs, (2, 1)) is ideal_slice(rs, (2, 1))


def _homogeneous(rs, letters):
    return to_free(rs, nested_chain(rs, letters))


letters = st.lists(st.integers(1, 3), min_size=1, max_size=2)


@given(letters, letters, letters)
def test_q_jacobi_and_leibniz_in_free_algebra(a, b, c):
    rs = build_root_system("B3")
    x, y, z = (_homogeneous(rs, t) for t in (a, b, c))
    if x.is_zero() or y.is_zero() or z.is_zero():
        return
    br = lambda u, v: free_commutator(rs, u, v)  # noqa: E731
    dy = y.degree(3)
    dz = z.degree(3)
    e = rs.pairing(dy, dz)
    # [x,[y,z]] = [[x,y],z] - q^{-<y,z>} [[x,z],y] - (q^{<y,z>} - q^{-<y,z>}) [x,z] y
    lhs = br(x, br(y, z))
    rhs = br(br(x, y), z) - br(br(x, z), y).scale(qpow(-e)) - (br(x, z) * y).scale(qpow(e) - qpow(-e))
    assert lhs == rhs
    # [x, yz] = [x,y] z + q^{<x,y>} y [x,z]
    dx = x.degree(3)
    assert br(x, y * z) == br(x, y) * z + (y * br(x, z)).scale(qpow(rs.pairing(dx, dy)))
