"""Acceptance criteria 1-13, one summary line each."""

from __future__ import annotations

import random
import time
from collections.abc import Callable

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import conftest
from qnilp.braidword import to_free
from qnilp.cartan import build_root_system
from qnilp.cli import load_table, main, parse_element, resolve_triple, verify_table
from qnilp.gamma import (
    NilpotencyEngine,
    chi,
    covers_L,
    covers_R,
    dual,
    enumerate_gamma,
    gamma_cardinality,
    load_fixture_seeds,
    nilpotency,
    oracle_check_seeds,
    orthogonality_holds,
)
from qnilp.qschubert import (
    PBWElement,
    complete_relations,
    host_word,
    new_presentation,
    nilpotency_pair,
    present_word,
    q_commutator,
    verify_seeds,
)
from qnilp.qscalar import ONE, hat, qpow
from qnilp.qserre import FreeElement, is_zero_mod_serre
from qnilp.weyl import bigrassmannian_count, enumerate_bigrassmannian

COMPUTED: dict[str, list[tuple[str, int]]] = {}


def record(k: int, ok: bool, detail: str) -> None:
    line = f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    conftest.CRITERIA[k] = line
    print(line)


def run_table(k: int, table_id: str, limit: float, engine: NilpotencyEngine | None = None) -> None:
    start = time.perf_counter()
    report = verify_table(table_id, engine or NilpotencyEngine(cache_dir=None, result_cache=False))
    elapsed = time.perf_counter() - start
    COMPUTED[table_id] = [(r.case.split(":")[1], r.computed[1]) for r in report.rows if r.computed]
    ok = report.ok and elapsed < limit
    bad = [r.case for r in report.rows if not r.match]
    record(k, ok, f"{table_id}: {report.matched}/{len(report.rows)} rows match in {elapsed:.1f} s"
           + (f"; mismatches {bad[:5]}" if bad else ""))
    assert report.ok, bad
    assert elapsed < limit


def test_criterion_01_small_rank_classical():
    run_table(1, "table1", 120)


def test_criterion_02_general_classical():
    run_table(2, "table2", 600)


def test_criterion_03_g2():
    run_table(3, "table3", 60)


def test_criterion_04_f4_from_fixture_seeds():
    start = time.perf_counter()
    rs = build_root_system("F4")
    p = new_presentation(rs, host_word(rs))
    seeds = load_fixture_seeds(rs.type)
    complete_relations(p, seeds, mine=False)
    assert p.is_complete() and not verify_seeds(p, seeds)
    # independent routes: the q-Serre oracle and a table grown from mined seeds only
    assert not oracle_check_seeds(p, seeds)
    mined = new_presentation(rs, host_word(rs))
    complete_relations(mined)
    assert mined.relations == p.relations
    engine = NilpotencyEngine(cache_dir=None, result_cache=False)
    engine.adopt_host(p)
    run_table(4, "table4", 900 - (time.perf_counter() - start), engine)


def test_criterion_05_e6():
    run_table(5, "table5", 45 * 60)


def test_criterion_06_bigrassmannian_counts():
    start = time.perf_counter()
    types = [f"A{n}" for n in range(1, 7)] + [f"{f}{n}" for f in "BC" for n in range(2, 6)]
    types += ["D4", "D5", "G2", "F4", "E6"]
    bad = [t for t in types if len(enumerate_bigrassmannian(build_root_system(t))) != bigrassmannian_count(t)]
    core = time.perf_counter() - start
    e7 = len(enumerate_bigrassmannian(build_root_system("E7")))
    fixed = {"G2": 8, "F4": 76, "E6": 119}
    bad += [t for t, v in fixed.items() if bigrassmannian_count(t) != v]
    ok = not bad and e7 == 641 == bigrassmannian_count("E7") and core < 600
    record(6, ok, f"{len(types)} types match the closed form in {core:.1f} s; E7 = {e7} "
           "(E8 = 7406 is a stretch, not run)")
    assert ok, bad


def test_criterion_07_gamma_cardinality():
    start = time.perf_counter()
    bad = []
    for t in ["A2", "A3", "B2", "B3", "C3", "G2"]:
        rs = build_root_system(t)
        if len(enumerate_gamma(rs)) != gamma_cardinality(rs):
            bad.append(t)
    f4 = gamma_cardinality(build_root_system("F4"))
    e6 = gamma_cardinality(build_root_system("E6"))
    elapsed = time.perf_counter() - start
    ok = not bad and f4 == 4416 and e6 == 453600 and elapsed < 300
    record(7, ok, f"brute force agrees on 6 types; F4 = {f4}, E6 = {e6}; {elapsed:.1f} s")
    assert ok, bad


def test_criterion_08_orthogonal_bigrassmannians():
    from test_gamma import _orthogonal_list

    bad = []
    types = [f"A{n}" for n in range(2, 7)] + [f"{f}{n}" for f in "BC" for n in range(2, 7)]
    types += [f"D{n}" for n in range(4, 7)]
    for t in types:
        rs = build_root_system(t)
        got = {w for w in enumerate_bigrassmannian(rs) if orthogonality_holds(rs, w)}
        if got != {parse_element(rs, "wparams " + s) for s in _orthogonal_list(t)}:
            bad.append(t)
    counts = {}
    for t in ["G2", "F4", "E6", "E7"]:
        rs = build_root_system(t)
        counts[t] = sum(1 for w in enumerate_bigrassmannian(rs) if orthogonality_holds(rs, w))
    e8 = len({parse_element(build_root_system("E8"), v) for v in _e8_fixture()})
    ok = not bad and counts == {"G2": 8, "F4": 34, "E6": 20, "E7": 113} and e8 == 1702
    record(8, ok, f"classical lists match for {len(types)} types; {counts}; "
           f"E8 fixture holds {e8} distinct elements (enumeration not run)")
    assert ok, bad


def _e8_fixture() -> list[str]:
    from qnilp.cli import load_elements

    return [f"{name}" for name in load_elements("E8")] + \
        [f"{name}^-1" for name in load_elements("E8")]


def _serre_check(rs, p) -> int:
    free = [FreeElement()] + [to_free(rs, e) for e in p.expressions()]
    failures = 0
    for (a, b) in p.relations:
        rhs = FreeElement()
        for mono, c in p.relation(a, b).terms.items():
            term = FreeElement({(): ONE})
            for m in mono:
                term = term * free[m]
            rhs = rhs + term.scale(c)
        lhs = free[a] * free[b] - (free[b] * free[a]).scale(qpow(p.pairing(a, b)))
        if not is_zero_mod_serre(rs, lhs - rhs):
            failures += 1
    return failures


def test_criterion_09_oracle_equivalence(engine):
    start = time.perf_counter()
    words: dict[str, set[tuple[int, ...]]] = {t: set() for t in ["A3", "B3", "C3", "G2"]}
    for row in load_table("table1") + load_table("table3"):
        if row.type in words:
            rs = build_root_system(row.type)
            words[row.type].add(resolve_triple(rs, row.w, row.i, row.j).w.reduced_word())
    checked = failures = 0
    for t, ws in words.items():
        rs = build_root_system(t)
        host = engine.host(rs)
        for p in [host] + [present_word(host, w) for w in sorted(ws)]:
            failures += _serre_check(rs, p)
            checked += len(p.relations)
    elapsed = time.perf_counter() - start
    ok = failures == 0 and elapsed < 600
    record(9, ok, f"{checked} relations zero mod the q-Serre ideal, {failures} failures, {elapsed:.1f} s")
    assert ok


def test_criterion_10_property_suite(engine):
    start = time.perf_counter()
    counts: dict[str, int] = {}

    def bump(key: str) -> None:
        counts[key] = counts.get(key, 0) + 1

    hosts = {t: engine.host(build_root_system(t)) for t in ["A4", "B3", "C4", "D4", "F4", "G2"]}
    names = sorted(hosts)

    @settings(max_examples=300, deadline=None)
    @given(st.sampled_from(names), st.data())
    def jacobi(t, data):
        p = hosts[t]
        a, b, c = (data.draw(st.integers(1, p.N)) for _ in range(3))
        x, y, z = (PBWElement.generator(k) for k in (a, b, c))
        br: Callable = lambda u, v: q_commutator(p, u, v)  # noqa: E731
        e = p.pairing(b, c)
        xz = br(x, z)
        assert br(x, br(y, z)) == br(br(x, y), z) - br(xz, y).scale(qpow(-e)) \
            - p.multiply(xz, y).scale(hat(qpow(e)))
        assert br(x, p.multiply(y, z)) == p.multiply(br(x, y), z) \
            + p.multiply(y, xz).scale(qpow(p.pairing(a, b)))
        bump("q-Jacobi/q-Leibniz")

    @settings(max_examples=300, deadline=None)
    @given(st.sampled_from(names), st.data())
    def assoc(t, data):
        p = hosts[t]
        mono = st.lists(st.integers(1, p.N), min_size=1, max_size=2).map(lambda m: tuple(sorted(m)))
        x, y, z = (PBWElement({data.draw(mono): ONE}) for _ in range(3))
        assert p.multiply(p.multiply(x, y), z) == p.multiply(x, p.multiply(y, z))
        bump("associativity")

    @settings(max_examples=200, deadline=None)
    @given(st.sampled_from(names), st.data())
    def bound(t, data):
        p = hosts[t]
        a = data.draw(st.integers(1, p.N - 1))
        b = data.draw(st.integers(a + 1, p.N))
        assert nilpotency_pair(p, a, b) <= p.rs.cmax + 1
        bump("index bound")

    gammas = {t: enumerate_gamma(build_root_system(t)) for t in ["A3", "B3", "C3", "G2", "B4", "D4"]}

    @settings(max_examples=200, deadline=None)
    @given(st.sampled_from(sorted(gammas)), st.data())
    def preserved(t, data):
        rs = build_root_system(t)
        x = data.draw(st.sampled_from(gammas[t]))
        for s in covers_L(rs, x) + covers_R(rs, x):
            assert engine.direct(rs, x) == engine.direct(rs, s.target)
        bump("reduction preserves N")

    @settings(max_examples=200, deadline=None)
    @given(st.sampled_from(["A3", "D4"]), st.data())
    def self_dual(t, data):
        rs = build_root_system(t)
        x = data.draw(st.sampled_from(gammas[t]))
        assert nilpotency(rs, x, engine) == nilpotency(rs, dual(x), engine)
        assert chi(rs, x) == chi(rs, dual(x))
        bump("dual invariance")

    for prop in (jacobi, assoc, bound, preserved, self_dual):
        prop()
    total = sum(counts.values())
    elapsed = time.perf_counter() - start
    ok = total >= 1000 and elapsed < 900
    record(10, ok, f"{total} randomized cases {counts} in {elapsed:.1f} s")
    assert ok


def test_criterion_11_closed_forms(engine):
    import test_closed_forms as lem

    start = time.perf_counter()
    checks = [lem.test_mixed_pairs, lem.test_short_root_pairs, lem.test_opposite_pair_sum,
              lem.test_crossed_pair_sum]
    failed = []
    ran = 0
    for fam in "BCD":
        for n in (4, 5):
            table = lem.Table(fam, n, engine)
            for check in checks:
                if fam == "D" and check is lem.test_short_root_pairs:
                    continue
                ran += 1
                try:
                    check(table)
                except AssertionError:
                    failed.append(f"{fam}{n}:{check.__name__}")
    elapsed = time.perf_counter() - start
    ok = not failed and elapsed < 600
    record(11, ok, f"{ran - len(failed)}/{ran} identity families exact on B4, B5, C4, C5, D4, D5 "
           f"in {elapsed:.1f} s")
    assert ok, failed


def test_criterion_12_maximum_index():
    needed = ["table1", "table2", "table3", "table4", "table5"]
    for t in needed:
        if t not in COMPUTED:
            report = verify_table(t)
            COMPUTED[t] = [(r.case.split(":")[1], r.computed[1]) for r in report.rows if r.computed]
    best: dict[str, int] = {}
    for t in needed:
        for typ, n in COMPUTED[t]:
            fam = typ[0] if typ[0] in "ABCD" else typ
            best[fam] = max(best.get(fam, 0), n)
    want = {"A": 2, "B": 3, "C": 3, "D": 3, "G2": 4, "F4": 5, "E6": 4}
    cmax = {"A": 1, "B": 2, "C": 2, "D": 2, "G2": 3, "F4": 4, "E6": 3}
    ok = best == want and all(best[f] == cmax[f] + 1 for f in want)
    record(12, ok, f"per-type maxima {best}")
    assert ok


def test_criterion_13_deep_sample(capsys):
    refused = main(["verify", "table6"])
    start = time.perf_counter()
    code = main(["verify", "table6", "--deep", "--sample", "10", "--seed", str(random.Random(13).randrange(10**6))])
    out = capsys.readouterr().out
    elapsed = time.perf_counter() - start
    ok = refused == 1 and code == 0 and "10/10 rows match" in out
    record(13, ok, f"table6 (E7) needs --deep; random 10-row sample under --deep matched in {elapsed:.1f} s; "
           "full E7/E8 tables are deep-only and not run here")
    assert ok, out


@pytest.fixture(autouse=True)
def _quiet_env(monkeypatch):
    monkeypatch.delenv("QNILP_CACHE_DIR", raising=False)
