"""Command-line front end, fixture loading and the table verification harness.

Element syntax accepted wherever a Weyl group element is expected:

* ``2,1,2`` or ``word 2,1,2``: product of simple reflections, left to right;
* ``wparams l,i,j,k,m[,+/-]``: the classical bigrassmannian w_{l,i,j,k,m};
* ``rho t1,...,tm``: product of reflections in the radical roots of the host word;
* ``e``: the identity;
* a fixture name such as ``kappa3`` or ``nu15``, optionally ``f(name)`` for a
  diagram automorphism ``f`` declared in the same fixture file, or ``name^-1``.
"""

from __future__ import annotations

import argparse
import json
import random
import re
import sys
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Sequence

from .cartan import LieType, RootSystem, build_root_system, parse_type
from .gamma import (
    GammaTriple,
    NilpotencyEngine,
    chi,
    enumerate_gamma,
    gamma_cardinality,
    nilpotency_report,
    orthogonality_holds,
    reduce_pipeline,
    weyl_order,
)
from .qschubert import complete_relations, host_word, new_presentation, present_word
from .weyl import (
    BigrassmannianParams,
    WeylElement,
    bigrassmannian_count,
    build_bigrassmannian,
    decode_rho,
    enumerate_bigrassmannian,
    from_word,
    identity,
    to_signed_permutation,
)

__all__ = [
    "RowResult",
    "TableRow",
    "UsageError",
    "VerificationReport",
    "load_elements",
    "load_table",
    "main",
    "parse_element",
    "resolve_triple",
    "table_ids",
    "verify_table",
]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_MISMATCH = 2

# table id -> (fixture file, requires --deep)
_TABLES = {
    "table1": ("table1", False),
    "table2": ("table2", False),
    "table3": ("table3", False),
    "table4": ("table4", False),
    "table5": ("table5", False),
    "table6": ("table6", True),
    "table7": ("table7", True),
    "table8": ("table7", True),
}

# rough single-core seconds per row, used only for the printed budget
_ROW_SECONDS = {"E7": 0.5, "E8": 30.0}


class UsageError(Exception):
    """Bad command-line input; reported with exit code 1."""


# -- fixtures --------------------------------------------------------------------------

def _fixture(*parts: str) -> str | None:
    node = resources.files("qnilp").joinpath("fixtures", *parts)
    return node.read_text() if node.is_file() else None


def _content_lines(text: str) -> list[str]:
    out = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            out.append(line)
    return out


def load_elements(t: LieType | str) -> dict[str, str]:
    """Named element definitions ``name := spec`` of fixtures/<type>/elements.txt."""
    text = _fixture(str(t), "elements.txt")
    if text is None:
        return {}
    out: dict[str, str] = {}
    for line in _content_lines(text):
        name, sep, body = line.partition(":=")
        if not sep:
            raise ValueError(f"bad element line {line!r}")
        out[name.strip()] = body.strip()
    return out


def _ints(text: str) -> list[int]:
    try:
        return [int(a) for a in text.replace(" ", "").split(",") if a]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def _apply_automorphism(rs: RootSystem, w: WeylElement, perm: Sequence[int]) -> WeylElement:
    if sorted(perm) != list(range(1, rs.rank + 1)):
        raise ValueError(f"automorphism {perm} is not a permutation")
    return from_word(rs, [perm[a - 1] for a in w.reduced_word()])


def parse_element(rs: RootSystem, text: str, _depth: int = 0) -> WeylElement:
    """Weyl group element from any of the accepted spellings."""
    if _depth > 8:
        raise ValueError(f"element definitions nest too deeply at {text!r}")
    text = text.strip()
    head, _, rest = text.partition(" ")
    if head == "wparams":
        try:
            params = BigrassmannianParams.parse(rest)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        return build_bigrassmannian(rs, params)
    if head == "rho":
        return decode_rho(rs, host_word(rs), _ints(rest))
    if head == "word":
        return _checked_word(rs, rest)
    if text in ("e", "id", ""):
        return identity(rs)
    if text[0].isdigit():
        return _checked_word(rs, text)
    defs = load_elements(rs.type)
    m = re.fullmatch(r"(\w+)\((\w+)\)", text)
    if m:
        auto = defs.get(m.group(1), "")
        if not auto.startswith("auto "):
            raise UsageError(f"{m.group(1)!r} is not an automorphism of {rs.type}")
        inner = parse_element(rs, m.group(2), _depth + 1)
        return _apply_automorphism(rs, inner, _ints(auto[5:]))
    m = re.fullmatch(r"(\w+)\^-1", text)
    if m:
        return parse_element(rs, m.group(1), _depth + 1).inverse()
    if text not in defs:
        raise UsageError(f"unknown element {text!r} for {rs.type}")
    return parse_element(rs, defs[text], _depth + 1)


def _checked_word(rs: RootSystem, text: str) -> WeylElement:
    word = _ints(text)
    if any(not 1 <= a <= rs.rank for a in word):
        raise UsageError(f"letters of {text!r} must lie in 1..{rs.rank}")
    return from_word(rs, word)


def _descent(w: WeylElement, given: str | int | None, side: str) -> int:
    if given not in (None, "-"):
        return int(given)
    ds = w.left_descents() if side == "left" else w.right_descents()
    if len(ds) != 1:
        raise UsageError(f"{side} index must be given: {side} descents are {sorted(ds)}")
    return next(iter(ds))


def resolve_triple(rs: RootSystem, text: str, i: str | int | None = None,
                   j: str | int | None = None) -> GammaTriple:
    """(w, i, j); omitted or '-' indices default to the unique descents."""
    w = parse_element(rs, text)
    return GammaTriple(w, _descent(w, i, "left"), _descent(w, j, "right"))


@dataclass(frozen=True)
class TableRow:
    case: str
    type: str
    w: str
    i: str
    j: str
    chi: tuple[int, int, int]
    n: int


def table_ids() -> list[str]:
    return list(_TABLES)


def load_table(table_id: str) -> list[TableRow]:
    if table_id not in _TABLES:
        raise UsageError(f"unknown table {table_id!r}; choose from {', '.join(_TABLES)}")
    text = _fixture("tables", _TABLES[table_id][0] + ".txt")
    if text is None:
        raise FileNotFoundError(f"fixture for {table_id} is missing")
    rows = []
    for k, line in enumerate(_content_lines(text), start=1):
        parts = [p.strip() for p in line.split(", ")]
        if len(parts) != 6:
            raise ValueError(f"{table_id} row {k}: expected 6 fields, got {line!r}")
        typ, w, i, j, ch, n = parts
        vals = tuple(_ints(ch.strip("()")))
        if len(vals) != 3:
            raise ValueError(f"{table_id} row {k}: bad chi {ch!r}")
        rows.append(TableRow(f"{k}:{typ}:{w}", typ, w, i, j, vals, int(n)))
    return rows


# -- verification ----------------------------------------------------------------------

@dataclass
class RowResult:
    case: str
    expected: tuple[tuple[int, int, int], int]
    computed: tuple[tuple[int, int, int], int] | None
    match: bool
    error: str | None = None


@dataclass
class VerificationReport:
    table_id: str
    rows: list[RowResult] = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def matched(self) -> int:
        return sum(r.match for r in self.rows)

    @property
    def ok(self) -> bool:
        return self.matched == len(self.rows)

    def to_json(self) -> dict:
        return {"table": self.table_id, "matched": self.matched, "rows": [
            {"case": r.case, "expected": {"chi": list(r.expected[0]), "n": r.expected[1]},
             "computed": None if r.computed is None else
             {"chi": list(r.computed[0]), "n": r.computed[1]},
             "match": r.match, "error": r.error} for r in self.rows]}


def verify_table(table_id: str, engine: NilpotencyEngine | None = None,
                 rows: Sequence[TableRow] | None = None) -> VerificationReport:
    """Recompute chi and N for every row; the engine must not read a result cache."""
    if engine is None:
        engine = NilpotencyEngine(cache_dir=None, result_cache=False)
    if engine.result_cache and engine.cache_dir is not None:
        raise ValueError("verification needs an engine without a result cache")
    rows = load_table(table_id) if rows is None else rows
    report = VerificationReport(table_id)
    start = time.perf_counter()
    for row in rows:
        expected = (row.chi, row.n)
        try:
            rs = build_root_system(row.type)
            x = resolve_triple(rs, row.w, row.i, row.j)
            rep = nilpotency_report(rs, x, engine)
            got = (rep.chi.as_tuple(), rep.n)
            report.rows.append(RowResult(row.case, expected, got, got == expected))
        except Exception as exc:  # reported per row, the table keeps going
            report.rows.append(RowResult(row.case, expected, None, False, f"{type(exc).__name__}: {exc}"))
    report.wall_time = time.perf_counter() - start
    return report


# -- commands --------------------------------------------------------------------------

def _emit(args: argparse.Namespace, payload: dict, lines: list[str]) -> None:
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        print("\n".join(lines))


_PREFIXES = ("wparams", "rho", "word")


def _split_spec(tokens: Sequence[str], max_rest: int) -> tuple[str, list[str]]:
    """Element text plus trailing positional tokens; ``wparams 0,1,0,2,0`` may arrive as two tokens."""
    tokens = list(tokens)
    take = 2 if tokens[0] in _PREFIXES and len(tokens) > 1 else 1
    text, rest = " ".join(tokens[:take]), tokens[take:]
    if len(rest) > max_rest:
        raise UsageError(f"unexpected arguments {rest[max_rest:]}")
    return text, rest


def _rs(args: argparse.Namespace) -> RootSystem:
    try:
        return build_root_system(parse_type(args.type))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _engine(args: argparse.Namespace, result_cache: bool = True) -> NilpotencyEngine:
    return NilpotencyEngine(cache_dir=args.cache_dir, recompute=args.recompute,
                            result_cache=result_cache)


def _word_text(w: WeylElement) -> str:
    return ",".join(map(str, w.reduced_word())) or "e"


def cmd_roots(args: argparse.Namespace) -> int:
    rs = _rs(args)
    short, long_ = rs.short_count()
    payload = {"type": str(rs.type), "cartan": [list(r) for r in rs.cartan], "d": list(rs.d),
               "positive_roots": len(rs.positive_roots), "short": short, "long": long_,
               "theta": list(rs.theta), "cmax": rs.cmax, "weyl_order": weyl_order(rs)}
    lines = [f"type {rs.type}", "cartan matrix:"]
    lines += ["  " + " ".join(f"{c:2d}" for c in row) for row in rs.cartan]
    lines += [f"d = {list(rs.d)}",
              f"positive roots: {len(rs.positive_roots)} ({short} short, {long_} long)",
              f"highest root: {list(rs.theta)}", f"cmax = {rs.cmax}", f"|W| = {weyl_order(rs)}"]
    if args.list:
        payload["roots"] = [list(r) for r in rs.positive_roots]
        lines += ["  " + str(list(r)) for r in rs.positive_roots]
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_weyl(args: argparse.Namespace) -> int:
    rs = _rs(args)
    w = parse_element(rs, _split_spec(args.spec, 0)[0])
    payload = {"type": str(rs.type), "word": list(w.reduced_word()), "length": w.length(),
               "left_descents": sorted(w.left_descents()),
               "right_descents": sorted(w.right_descents()),
               "support": sorted(w.support()), "bigrassmannian": len(w.left_descents()) == 1
               and len(w.right_descents()) == 1}
    lines = [f"reduced word: {_word_text(w)}", f"length: {w.length()}",
             f"left descents: {sorted(w.left_descents())}",
             f"right descents: {sorted(w.right_descents())}",
             f"support: {sorted(w.support())}",
             f"bigrassmannian: {'yes' if payload['bigrassmannian'] else 'no'}"]
    if payload["bigrassmannian"]:
        orth = orthogonality_holds(rs, w)
        payload["orthogonal"] = orth
        lines.append(f"orthogonality condition: {'holds' if orth else 'fails'}")
    if rs.type.family in "ABCD":
        sp = list(to_signed_permutation(rs, w))
        payload["signed_permutation"] = sp
        lines.append(f"signed permutation: {sp}")
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_bigr(args: argparse.Namespace) -> int:
    rs = _rs(args)
    if str(rs.type) == "E8" and not args.deep:
        raise UsageError("bigr E8 enumerates 7406 elements and requires --deep")
    if args.deep:
        print(f"deep run: bigr {rs.type}; estimated budget up to 1 h on one core", file=sys.stderr)
    found = enumerate_bigrassmannian(rs, full_support=True, node_budget=args.budget)
    orth = [w for w in found if orthogonality_holds(rs, w)]
    formula = bigrassmannian_count(rs.type)
    payload = {"type": str(rs.type), "bigr": len(found), "formula": formula,
               "orthogonal": len(orth)}
    lines = [f"|BiGr°({rs.type})| = {len(found)} (formula {formula})",
             f"|BiGr_⊥°({rs.type})| = {len(orth)}"]
    if args.list:
        payload["elements"] = [list(w.reduced_word()) for w in orth]
        lines += ["  " + _word_text(w) for w in orth]
    _emit(args, payload, lines)
    return EXIT_OK if len(found) == formula else EXIT_MISMATCH


def cmd_gamma_card(args: argparse.Namespace) -> int:
    rs = _rs(args)
    formula = gamma_cardinality(rs)
    payload: dict = {"type": str(rs.type), "formula": formula, "brute": None}
    lines = [f"|Gamma(W({rs.type}))| = {formula} (formula)"]
    code = EXIT_OK
    if args.brute:
        brute = len(enumerate_gamma(rs, cap=args.budget or 10**6))
        payload["brute"] = brute
        lines.append(f"brute force: {brute} ({'match' if brute == formula else 'MISMATCH'})")
        code = EXIT_OK if brute == formula else EXIT_MISMATCH
    else:
        lines.append("brute force: skipped (use --brute)")
    _emit(args, payload, lines)
    return code


def _triple_arg(rs: RootSystem, args: argparse.Namespace) -> GammaTriple:
    text, rest = _split_spec(args.spec, 2)
    rest += [None] * (2 - len(rest))
    x = resolve_triple(rs, text, rest[0], rest[1])
    if not x.is_valid():
        raise UsageError(f"{x} is not in Gamma(W({rs.type}))")
    return x


def _triple_payload(rs: RootSystem, x: GammaTriple) -> dict:
    return {"type": str(rs.type), "word": list(x.word()), "i": x.i, "j": x.j,
            "chi": list(chi(rs, x).as_tuple())}


def cmd_reduce(args: argparse.Namespace) -> int:
    rs = _rs(args)
    x = _triple_arg(rs, args)
    red = reduce_pipeline(rs, x)
    payload = _triple_payload(rs, x)
    payload.update({"chain": [s.to_json() for s in red.chain], "kind": red.kind,
                    "terminal": {"type": str(red.rs.type), "word": list(red.terminal.word()),
                                 "i": red.terminal.i, "j": red.terminal.j},
                    "relabels": [{"from": a, "to": b, "sigma": list(s)} for a, b, s in red.relabels]})
    lines = [f"start: {x} in {rs.type}, chi = {chi(rs, x)}"]
    lines += [f"  {s}" for s in red.chain]
    lines += [f"  relabel {a} -> {b} via {list(s)}" for a, b, s in red.relabels]
    lines.append(f"terminal ({red.kind}): {red.terminal} in {red.rs.type}")
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_present(args: argparse.Namespace) -> int:
    rs = _rs(args)
    w = parse_element(rs, _split_spec(args.spec, 0)[0])
    word = w.reduced_word()
    p = new_presentation(rs, word)
    complete_relations(p)
    source = "completion"
    if not p.is_complete():
        host = _engine(args).host(rs)
        p = present_word(host, word)
        source = "host"
    pairs = sorted(p.relations)
    payload = {"type": str(rs.type), "word": list(word), "source": source,
               "roots": [list(b) for b in p.betas[1:]],
               "relations": [p.format_relation(a, b) for a, b in pairs]}
    lines = [f"word {_word_text(w)} ({len(word)} root vectors, relations by {source})"]
    lines += [f"  X{k} -> {list(b)}" for k, b in enumerate(p.betas[1:], start=1)]
    lines += ["  " + p.format_relation(a, b) for a, b in pairs]
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_nil(args: argparse.Namespace) -> int:
    rs = _rs(args)
    x = _triple_arg(rs, args)
    rep = nilpotency_report(rs, x, _engine(args))
    payload = _triple_payload(rs, x)
    payload.update({"n": rep.n, "chain": [s.to_json() for s in rep.chain]})
    if args.json:
        _emit(args, payload, [])
    else:
        print(rep.n)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    if args.table not in _TABLES:
        raise UsageError(f"unknown table {args.table!r}; choose from {', '.join(_TABLES)}")
    rows = load_table(args.table)
    deep = _TABLES[args.table][1]
    if deep and not args.deep:
        raise UsageError(f"{args.table} ({rows[0].type}, {len(rows)} rows) requires --deep")
    if args.sample is not None:
        rng = random.Random(args.seed)
        picked = sorted(rng.sample(range(len(rows)), min(args.sample, len(rows))))
        rows = [rows[k] for k in picked]
    if deep:
        hours = len(rows) * _ROW_SECONDS.get(rows[0].type, 60.0) / 3600
        print(f"deep run: {args.table} ({rows[0].type}, {len(rows)} rows); "
              f"estimated budget up to {hours:.1f} h on one core", file=sys.stderr)
    # host relations may be reused, computed results never are
    engine = _engine(args, result_cache=False)
    report = verify_table(args.table, engine, rows)
    if args.json:
        print(json.dumps(report.to_json(), sort_keys=True))
    else:
        for r in report.rows:
            got = "error: " + r.error if r.computed is None else \
                f"chi=({','.join(map(str, r.computed[0]))}) N={r.computed[1]}"
            exp = f"chi=({','.join(map(str, r.expected[0]))}) N={r.expected[1]}"
            print(f"{'ok  ' if r.match else 'FAIL'} {r.case}: expected {exp}, computed {got}", flush=True)
        print(f"{args.table}: {report.matched}/{len(report.rows)} rows match")
    print(f"wall time {report.wall_time:.1f} s", file=sys.stderr)
    return EXIT_OK if report.ok else EXIT_MISMATCH


# -- argument parsing -----------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--deep", action="store_true", help="allow multi-hour E7/E8 runs")
    common.add_argument("--recompute", action="store_true", help="ignore cached presentations and results")
    common.add_argument("--cache-dir", type=Path, default=None,
                        help="cache directory (default: $QNILP_CACHE_DIR, else no disk cache)")
    common.add_argument("--budget", type=int, default=None, help="node budget for enumerations")

    parser = _Parser(prog="qnilp", description="Nilpotency indices of quantum root vectors.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("roots", parents=[common], help="root system data")
    p.add_argument("type")
    p.add_argument("--list", action="store_true", help="list the positive roots")
    p.set_defaults(func=cmd_roots)

    p = sub.add_parser("weyl", parents=[common], help="describe a Weyl group element")
    p.add_argument("type")
    p.add_argument("spec", nargs="+", metavar="WORD")
    p.set_defaults(func=cmd_weyl)

    p = sub.add_parser("bigr", parents=[common], help="count full-support bigrassmannians")
    p.add_argument("type")
    p.add_argument("--list", action="store_true", help="list the orthogonal ones")
    p.set_defaults(func=cmd_bigr)

    p = sub.add_parser("gamma-card", parents=[common], help="cardinality of Gamma(W)")
    p.add_argument("type")
    p.add_argument("--brute", action="store_true", help="cross-check by enumeration")
    p.set_defaults(func=cmd_gamma_card)

    for name, func, help_ in (("reduce", cmd_reduce, "reduction chain of (w, i, j)"),
                              ("nil", cmd_nil, "nilpotency index of (w, i, j)")):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("type")
        p.add_argument("spec", nargs="+", metavar="WORD [I J]")
        p.set_defaults(func=func)

    p = sub.add_parser("present", parents=[common], help="PBW presentation of U_q^+[w]")
    p.add_argument("type")
    p.add_argument("spec", nargs="+", metavar="WORD")
    p.set_defaults(func=cmd_present)

    p = sub.add_parser("verify", parents=[common], help="recompute a data table")
    p.add_argument("table", help=", ".join(_TABLES))
    p.add_argument("--sample", type=int, default=None, help="check a random subset of rows")
    p.add_argument("--seed", type=int, default=0, help="seed for --sample")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"qnilp: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"qnilp: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
