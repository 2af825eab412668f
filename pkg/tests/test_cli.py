from __future__ import annotations

import json
import shutil
import subprocess
import sys

import pytest

from grothlin.cli import infer_vars, main
from grothlin.corpus import corpus_dir
from grothlin.report import Report, dumps


def run(capsys, *argv: str) -> tuple[int, str, str]:
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def eval_json(capsys, expr: str, *extra: str) -> dict:
    code, out, _ = run(capsys, "eval", "-e", expr, "--json", *extra)
    assert code == 0
    return json.loads(out)


@pytest.mark.parametrize("expr,g,b,cls", [
    ("0 < x & x < 1", -1, -1, "-1"),
    ("0 < x", -1, 0, "T"),
    ("x = x", -1, 1, "2*T + 1"),
])
def test_eval_examples(capsys, expr, g, b, cls):
    doc = eval_json(capsys, expr)
    assert (doc["chi_g"], doc["chi_b"], doc["class"]) == (g, b, cls)


def test_eval_report_fields(capsys):
    doc = eval_json(capsys, "0 <= x & x <= 1 & 0 <= y & y < x", "--vars", "x,y")
    assert doc["vars"] == ["x", "y"] and doc["dim"] == 2
    assert doc["bounded"] is True and doc["kinds"]["bad"] == 0
    assert doc["cell_count"] == sum(doc["kinds"].values())


def test_eval_text_output(capsys):
    code, out, _ = run(capsys, "eval", "-e", "x = x")
    assert code == 0 and "2*T + 1" in out


def test_eval_reads_file_header(tmp_path, capsys):
    f = tmp_path / "set.gl"
    f.write_text("# vars: y, x\n0 < x & x < y\n", encoding="utf-8")
    code, out, _ = run(capsys, "eval", str(f), "--json")
    assert code == 0 and json.loads(out)["vars"] == ["y", "x"]


def test_json_roundtrip_is_byte_identical(capsys):
    code, out, _ = run(capsys, "eval", "-e", "0 < x & x < y", "--json")
    assert code == 0
    doc = json.loads(out)
    assert dumps(doc) + "\n" == out
    assert dumps(Report.from_json(doc).to_json()) + "\n" == out


@pytest.mark.parametrize("expr,expected", [
    ("EX y. (x < y & y < 1)", "x < 1"),
    ("EX x. (0 < x & x < 0)", "false"),
    ("EX y. (y = x & 0 < y)", "0 < x"),
])
def test_qe_examples(capsys, expr, expected):
    code, out, _ = run(capsys, "qe", "-e", expr)
    assert code == 0 and out.strip() == expected


def test_cells_examples(capsys):
    code, out, _ = run(capsys, "cells", "-e", "x = x", "--json")
    doc = json.loads(out)
    assert [c["kind"] for c in doc["cells"]] == ["bad", "good", "bad"]
    code, out, _ = run(capsys, "cells", "-e", "0 < x & x < 1", "--json")
    assert [c["kind"] for c in json.loads(out)["cells"]] == ["good"]
    code, out, _ = run(capsys, "cells", "-e", "0 < x & 0 < y", "--json")
    cells = json.loads(out)["cells"]
    assert [(c["kind"], c["dim"]) for c in cells] == [("bad", 2)]


def test_exit_codes(capsys):
    code, _, err = run(capsys, "eval", "-e", "x < z", "--vars", "x")
    assert code == 3 and "z" in err
    code, _, err = run(capsys, "eval", "-e", "0 < < x")
    assert code == 2 and err
    code, _, err = run(capsys, "eval", "/nonexistent/file.gl")
    assert code == 2 and "/nonexistent/file.gl" in err


def test_infer_vars():
    assert infer_vars("EX z. (y < z & z < x)") == ["x", "y"]


# -- map ---------------------------------------------------------------------

@pytest.fixture
def abs_map(tmp_path):
    doc = {"src": 1, "dst": 1, "vars": ["x"], "pieces": [
        {"where": "0 <= x", "rows": ["x"]}, {"where": "x < 0", "rows": ["-x"]}]}
    p = tmp_path / "abs.json"
    p.write_text(json.dumps(doc), encoding="utf-8")
    return p


def _set(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text + "\n", encoding="utf-8")
    return str(p)


def test_map_apply_and_image(capsys, tmp_path, abs_map):
    code, out, _ = run(capsys, "map", "apply", "--map", str(abs_map), "--point=-3/2")
    assert code == 0 and out.strip() == "3/2"
    code, out, _ = run(capsys, "map", "image", "--map", str(abs_map),
                       "--set", _set(tmp_path, "s.gl", "-1 < x & x < 2"))
    assert code == 0 and out.strip() == "x = 0 | 0 < x & x < 2"


def test_map_injective_and_bijection(capsys, tmp_path, abs_map):
    line = _set(tmp_path, "line.gl", "x = x")
    pos = _set(tmp_path, "pos.gl", "0 < x")
    code, out, _ = run(capsys, "map", "injective", "--map", str(abs_map), "--set", line)
    assert code == 1 and out.strip() == "false"
    code, out, _ = run(capsys, "map", "bijection", "--map", str(abs_map), "--set", pos, "--target", pos)
    assert code == 0 and out.strip() == "true"


def test_map_errors(capsys, tmp_path, abs_map):
    bad = tmp_path / "bad.json"
    bad.write_text("{", encoding="utf-8")
    assert run(capsys, "map", "apply", "--map", str(bad), "--point", "1")[0] == 2
    assert run(capsys, "map", "apply", "--map", str(abs_map), "--point", "1,2")[0] == 2
    half = tmp_path / "half.json"
    half.write_text(json.dumps({"src": 1, "dst": 1, "pieces": [{"where": "0 < x1", "rows": ["x1"]}]}))
    assert run(capsys, "map", "apply", "--map", str(half), "--point", "-1")[0] == 2


# -- bd ----------------------------------------------------------------------

def test_bd_line_abs(capsys, tmp_path):
    s = _set(tmp_path, "x.gl", "x = x")
    d = _set(tmp_path, "d.gl", "(t = x & 0 <= x) | (t = -x & x < 0)")
    code, out, _ = run(capsys, "bd", "--set", s, "--dist", d, "--vars", "x", "--json")
    doc = json.loads(out)
    assert code == 0 and doc["chi_b"] == 1 and all(smp["ok"] for smp in doc["samples"])


def test_bd_failure_exit(capsys, tmp_path):
    s = _set(tmp_path, "x.gl", "x = x")
    d = _set(tmp_path, "d.gl", "t = x")
    code, out, _ = run(capsys, "bd", "--set", s, "--dist", d, "--vars", "x")
    assert code == 1 and "nonnegative: failed" in out


# -- selftest ----------------------------------------------------------------

def test_selftest_filter(capsys):
    code, out, _ = run(capsys, "selftest", "--filter", "claim3", "--json")
    doc = json.loads(out)
    assert code == 0 and [s["name"] for s in doc["suites"]] == ["claim3"]


def test_selftest_unknown_suite(capsys):
    assert run(capsys, "selftest", "--filter", "nope")[0] == 2


def test_selftest_corrupted_corpus(capsys, tmp_path):
    bad = tmp_path / "corpus"
    shutil.copytree(corpus_dir(), bad)
    victim = bad / "open_interval.gl"
    victim.write_text(victim.read_text(encoding="utf-8").replace("0 < x", "0 < < x"), encoding="utf-8")
    code, _, err = run(capsys, "selftest", "--filter", "corpus", "--corpus", str(bad))
    assert code == 2 and "open_interval.gl" in err


def test_selftest_full_run():
    # the whole invariant suite, through a real process
    proc = subprocess.run([sys.executable, "-m", "grothlin", "selftest"],
                          capture_output=True, text=True, timeout=300)
    assert proc.returncode == 0, proc.stdout + proc.stderr
    assert "FAIL" not in proc.stdout
