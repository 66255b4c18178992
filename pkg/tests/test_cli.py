from __future__ import annotations

import json
import subprocess
import sys

import pytest

from qnilp.cli import (
    EXIT_MISMATCH,
    EXIT_OK,
    EXIT_USAGE,
    TableRow,
    load_table,
    main,
    table_ids,
    verify_table,
)
from qnilp.gamma import NilpotencyEngine


@pytest.fixture(autouse=True)
def _no_env_cache(monkeypatch):
    monkeypatch.delenv("QNILP_CACHE_DIR", raising=False)


def run(capsys, *argv: str) -> tuple[int, str, str]:
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_nil_examples(capsys):
    assert run(capsys, "nil", "G2", "1,2,1,2", "1", "2")[:2] == (EXIT_OK, "4\n")
    assert run(capsys, "nil", "A2", "word", "1,2", "1", "2")[:2] == (EXIT_OK, "1\n")
    assert run(capsys, "nil", "C3", "wparams", "0,1,2,0,0")[:2] == (EXIT_OK, "3\n")
    assert run(capsys, "nil", "F4", "f(kappa4)")[0] == EXIT_OK


def test_nil_json_schema(capsys):
    code, out, _ = run(capsys, "nil", "G2", "1,2,1,2", "1", "2", "--json")
    data = json.loads(out)
    assert code == EXIT_OK
    assert {"type", "word", "i", "j", "chi", "n", "chain"} <= set(data)
    assert data["type"] == "G2" and data["n"] == 4 and len(data["chi"]) == 3


def test_gamma_card(capsys):
    code, out, _ = run(capsys, "gamma-card", "F4")
    assert code == EXIT_OK and "4416" in out
    code, out, _ = run(capsys, "gamma-card", "B3", "--brute", "--json")
    data = json.loads(out)
    assert data["formula"] == data["brute"]


def test_bigr(capsys):
    code, out, _ = run(capsys, "bigr", "F4", "--json")
    data = json.loads(out)
    assert code == EXIT_OK
    assert data["formula"] == data["bigr"] == 76 and data["orthogonal"] == 34
    assert run(capsys, "bigr", "E8")[0] == EXIT_USAGE


def test_roots_weyl_reduce_present(capsys):
    code, out, _ = run(capsys, "roots", "E6", "--json")
    assert code == EXIT_OK and json.loads(out)["positive_roots"] == 36
    code, out, _ = run(capsys, "weyl", "B2", "wparams", "0,0,1,1,0", "--json")
    assert code == EXIT_OK and json.loads(out)["bigrassmannian"] is True
    code, out, _ = run(capsys, "reduce", "B3", "wparams", "0,0,2,1,0", "--json")
    data = json.loads(out)
    assert code == EXIT_OK and data["kind"] in ("shortcut", "dihedral", "orthogonal")
    code, out, _ = run(capsys, "present", "G2", "1,2,1,2,1,2")
    assert code == EXIT_OK and "[x1, x5] = (q + q^-1)*x3" in out


@pytest.mark.parametrize("argv", [
    ["nil", "Z9", "1"],
    ["nil", "A2", "1,1", "1", "1"],
    ["nil", "A2", "1", "2", "2"],
    ["verify", "table99"],
    ["verify", "table6"],
    ["frobnicate"],
    ["weyl", "A2", "wparams", "0,1,0,2,0", "extra"],
])
def test_usage_errors_exit_one(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == EXIT_USAGE and err


def test_verify_small_tables(capsys):
    code, out, _ = run(capsys, "verify", "table1")
    assert code == EXIT_OK and "table1: 15/15 rows match" in out
    code, out, _ = run(capsys, "verify", "table3", "--json")
    data = json.loads(out)
    assert data["matched"] == len(data["rows"]) == 8


def test_verify_reports_mismatch():
    row = load_table("table3")[0]
    bad = TableRow(row.case, row.type, row.w, row.i, row.j, row.chi, row.n + 1)
    report = verify_table("table3", rows=[bad])
    assert not report.ok and report.rows[0].computed is not None


def test_mismatch_exit_code(capsys, monkeypatch):
    import qnilp.cli as cli
    real = cli.load_table

    def wrong(table_id):
        rows = real(table_id)
        r = rows[0]
        return [TableRow(r.case, r.type, r.w, r.i, r.j, r.chi, r.n + 1)] + rows[1:]

    monkeypatch.setattr(cli, "load_table", wrong)
    assert run(capsys, "verify", "table3")[0] == EXIT_MISMATCH


def test_verify_refuses_cached_results(tmp_path):
    with pytest.raises(ValueError):
        verify_table("table3", engine=NilpotencyEngine(cache_dir=tmp_path))


def test_verify_ignores_a_poisoned_result_cache(capsys, tmp_path):
    cache = str(tmp_path)
    code, out, _ = run(capsys, "nil", "F4", "kappa4", "--cache-dir", cache)
    assert (code, out) == (EXIT_OK, "3\n")
    results = tmp_path / "results" / "F4.txt"
    lines = results.read_text().splitlines()
    assert lines
    poisoned = [ln.rsplit(", ", 1)[0] + ", 9" for ln in lines]
    results.write_text("\n".join(poisoned) + "\n")
    # the lookup path trusts the table
    assert run(capsys, "nil", "F4", "kappa4", "--cache-dir", cache)[1] == "9\n"
    # verification recomputes
    code, out, _ = run(capsys, "verify", "table4", "--cache-dir", cache, "--sample", "4", "--seed", "3")
    assert code == EXIT_OK and "4/4 rows match" in out
    assert (tmp_path / "relations" / "F4.txt").is_file()


def test_warm_cache_is_byte_identical(capsys, tmp_path):
    argv = ["nil", "E6", "nu9", "--json", "--cache-dir", str(tmp_path)]
    first = run(capsys, *argv)
    second = run(capsys, *argv)
    assert first == second and json.loads(first[1])["n"] == 4


def test_env_cache_dir(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("QNILP_CACHE_DIR", str(tmp_path))
    assert run(capsys, "nil", "G2", "1,2,1,2", "1", "2")[1] == "4\n"
    assert (tmp_path / "relations" / "G2.txt").is_file()


def test_deep_tables_are_listed():
    assert {"table1", "table5", "table6", "table7", "table8"} <= set(table_ids())
    assert len(load_table("table6")) == 76


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "qnilp.cli", "nil", "G2", "1,2,1,2", "1", "2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout == "4\n"
