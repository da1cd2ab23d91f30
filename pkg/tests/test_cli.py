from __future__ import annotations

import json
import subprocess
import sys

import jsonschema
import pytest

from ncomm.cli import SCHEMA_PATH, main

SCHEMA = json.loads(SCHEMA_PATH.read_text())
WORKED = ["d1", "d2", "x1*d2", "x1*d1-x2*d2", "x2^2*d1"]


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    doc = json.loads(out)
    jsonschema.validate(doc, SCHEMA)
    return code, doc


def test_eval_worked_example(capsys):
    code, out, _ = run(capsys, "eval", "--k", "5", *WORKED)
    assert code == 0 and out.strip() == "6*d1"


@pytest.mark.parametrize("strategy", ["naive", "subset-dp", "cup", "rsym"])
def test_eval_strategies(capsys, strategy):
    code, out, _ = run(capsys, "eval", "--strategy", strategy, *WORKED)
    assert code == 0 and out.strip() == "6*d1"


def test_eval_closed_formula(capsys):
    code, out, _ = run(capsys, "eval", "--formula", "closed", *WORKED)
    assert code == 0 and out.strip() == "6*d1"


def test_eval_commutator(capsys):
    code, out, _ = run(capsys, "eval", "--k", "2", "x1*d1", "d1")
    assert code == 0 and out.strip() == "d1"


def test_eval_s6_on_divfree_tuple(capsys):
    code, out, _ = run(capsys, "eval", "--k", "6", "d1", "d2", "x1*d2", "x2*d1", "x1*d1-x2*d2", "x1^2*d2")
    assert code == 0 and out.strip() == "0"


def test_eval_json(capsys):
    code, doc = run_json(capsys, "eval", *WORKED)
    assert code == 0 and doc["value"] == "6*d1" and doc["orders"] == [1]


def test_eval_usage_errors(capsys):
    code, _, err = run(capsys, "eval", "--k", "3", "d1", "d2")
    assert code == 2 and "operators supplied" in err
    code, _, err = run(capsys, "eval", "x1 d1")
    assert code == 2 and "position 3" in err
    code, _, err = run(capsys, "eval", "--formula", "closed", "d1", "d2")
    assert code == 2
    code, _, _ = run(capsys, "eval", "--mode", "bogus", "d1")
    assert code == 2


def test_verify_named_check(capsys):
    code, out, _ = run(capsys, "verify", "--check", "s7-zero", "--n", "2", "--samples", "3")
    assert code == 0
    assert out.startswith("# ncomm verify  seed=1")
    assert "s7-zero" in out and "ok" in out


def test_verify_domain_variant(capsys):
    code, doc = run_json(capsys, "verify", "--check", "s5-well-defined", "--domain", "vect", "--samples", "3")
    assert code == 0
    (rep,) = doc["reports"]
    assert rep["name"] == "s5-well-defined-vect"
    assert rep["expected"] == "fail" and not rep["passed"] and rep["ok"]
    assert rep["counterexample"]["value"] == "-d1*d2"


def test_verify_usage_errors(capsys):
    assert run(capsys, "verify", "--check", "nope")[0] == 2
    assert run(capsys, "verify")[0] == 2
    assert run(capsys, "verify", "--all", "--domain", "vect")[0] == 2
    assert run(capsys, "verify", "--check", "s7-zero", "--n", "3")[0] == 2
    assert run(capsys, "verify", "--check", "s7-zero", "--domain", "vect0")[0] == 2


def test_verify_list(capsys):
    code, out, _ = run(capsys, "verify", "--list")
    assert code == 0 and "conjecture-n3" in out and "expect-fail" in out


def test_verify_jobs_keep_order(capsys):
    names = ["pr2-s3", "s5-escort", "s7-zero", "jacobi"]
    argv = ["verify", "--samples", "2"] + [a for n in names for a in ("--check", n)]
    code1, doc1 = run_json(capsys, *argv)
    code2, doc2 = run_json(capsys, *argv, "--jobs", "2")
    assert code1 == code2 == 0
    assert [r["name"] for r in doc1["reports"]] == names == [r["name"] for r in doc2["reports"]]
    strip = lambda d: [{k: v for k, v in r.items() if k != "millis"} for r in d["reports"]]
    assert strip(doc1) == strip(doc2)


def test_escort_commands(capsys):
    code, doc = run_json(capsys, "escort", "--k", "5", "--n", "2", "--divfree")
    assert code == 0 and len(doc["table"]["entries"]) == 6
    code, doc = run_json(capsys, "escort", "--k", "7", "--n", "2")
    assert code == 0 and doc["table"]["entries"] == [] and doc["table"]["swept"] == 4
    code, out, _ = run(capsys, "escort", "--k", "6", "--n", "2")
    assert code == 0 and out.count("\ns6(") == 14


def test_escort_budget(capsys):
    code, _, err = run(capsys, "escort", "--k", "13", "--n", "3", "--budget", "10")
    assert code == 2 and "budget" in err


def test_escort_out_file(capsys, tmp_path):
    path = tmp_path / "t.json"
    code, _, _ = run(capsys, "escort", "--k", "5", "--divfree", "--out", str(path))
    doc = json.loads(path.read_text())
    jsonschema.validate(doc, SCHEMA["$defs"]["escort"])
    assert code == 0 and doc["arity"] == 5


def test_bench(capsys):
    code, doc = run_json(capsys, "bench", "--k", "6", "--repeat", "1")
    assert code == 0 and doc["agree"]
    assert [r["strategy"] for r in doc["rows"]] == ["naive-permutations", "subset-dp", "cup-split"]
    code, doc = run_json(capsys, "bench", "--k", "3", "--repeat", "1", "--strategies", "naive,dp")
    assert code == 0 and doc["agree"]
    code, doc = run_json(capsys, "bench", "--k", "13", "--n", "3", "--repeat", "1",
                         "--strategies", "naive,subset-dp", "--source", "support", "--index", "9")
    assert code == 0 and doc["value"] == "4*d3"
    assert "skipped" in doc["rows"][0]


def test_bench_rejects_rsym(capsys):
    assert run(capsys, "bench", "--k", "3", "--strategies", "rsym")[0] == 2


def test_docs(capsys, tmp_path):
    code, _, _ = run(capsys, "docs", "--out", str(tmp_path))
    assert code == 0
    text = (tmp_path / "adjoint_s6.md").read_text()
    assert "| `x1^2*d1` | `-12*d2` | `-12*d2` |" in text
    assert (tmp_path / "s6_blocks.md").read_text().count("| d2 |") == 7


def test_console_script_entry_point():
    out = subprocess.run([sys.executable, "-m", "ncomm.cli", "eval", *WORKED], capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.strip() == "6*d1"
