import csv
import io
import json
from fractions import Fraction

import pytest

from tropa.cli import main


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def test_eval():
    assert run("eval", "--automaton", "fixture:E1max", "--word", "aa") == (0, "2\n")
    assert run("eval", "--automaton", "fixture:E1max", "--term", "e()") == (0, "0\n")


def test_eval_bad_term_is_usage_error():
    assert run("eval", "--automaton", "fixture:E1max", "--term", "b(e())")[0] == 64


def test_argparse_errors_exit_64():
    with pytest.raises(SystemExit) as info:
        main(["eval"])
    assert info.value.code == 64


def test_separate_value_in_range():
    code, out = run("separate", "--max", "fixture:E1max", "--min", "fixture:E1min",
                    "--check", "6", "--eval-word", "aaa")
    assert code == 0
    value = Fraction(out.strip().splitlines()[-1].split("\t")[1])
    assert 3 <= value <= 6


def test_separate_swapped():
    code, out = run("separate", "--max", "fixture:E1min", "--min", "fixture:E1max", "--check", "6")
    assert code == 2 and "witness: a(e())" in out


def test_separate_budget():
    code, _ = run("separate", "--max", "fixture:E1max", "--min", "fixture:E1min",
                  "--materialize", "--budget", "0")
    assert code == 3


def test_materialize_to_file(tmp_path):
    target = tmp_path / "sep.wta"
    code, _ = run("separate", "--max", "fixture:E1max", "--min", "fixture:E1min",
                  "--materialize", "--out", str(target))
    assert code == 0
    assert run("eval", "--automaton", str(target), "--word", "aaaa") == (0, "4\n")
    names = json.loads((tmp_path / "sep.wta.states.json").read_text())
    assert len(names) == 1


def test_verify():
    assert run("verify", "--max", "fixture:E1max", "--min", "fixture:E1min",
               "--suite", "all", "--height", "4")[0] == 0
    assert run("verify", "--max", "fixture:E1min", "--min", "fixture:E1max")[0] == 1


def test_verify_json():
    code, out = run("verify", "--max", "fixture:E1max", "--min", "fixture:E2min",
                    "--suite", "corollary", "--json")
    assert code == 0 and json.loads(out)["verdict"] == "pass"


def test_report_dir(tmp_path):
    code, _ = run("verify", "--max", "fixture:B2max", "--min", "fixture:B2min",
                  "--suite", "separation", "--height", "2", "--report-dir", str(tmp_path))
    assert code == 0
    with open(tmp_path / "separation.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["term", "max", "sep", "min"] and len(rows) == 14
    assert (tmp_path / "separation.png").stat().st_size > 0


def test_certificate(tmp_path):
    path = tmp_path / "cert.json"
    path.write_text(json.dumps({"s": "a(a(e()))", "t": "a(e())", "P": ["q", "r"], "x": "1"}))
    assert run("verify", "--max", "fixture:E1max", "--min", "fixture:E1min",
               "--certificate", str(path)) == (0, "valid\n")
    path.write_text(json.dumps({"s": "a(a(e()))", "t": "a(e())", "P": ["q", "r"], "x": "5"}))
    assert run("verify", "--max", "fixture:E1max", "--min", "fixture:E1min",
               "--certificate", str(path))[0] == 1


def test_reachprod(tmp_path):
    assert run("reachprod", "--bi-of", "fixture:E1max", "fixture:E1min",
               "--term", "e()") == (0, "{q, r}\n")
    code, out = run("reachprod", "--bi-of", "fixture:E1max", "fixture:E1min", "--families")
    assert out.count("reachable") == 1 and out.count("productive") == 1
    for name, mode, state in (("m.wta", "max", "q"), ("n.wta", "min", "r")):
        (tmp_path / name).write_text(
            f"alphabet {{ e/0, a/1 }}\nmode {mode}\nstates {state}\ntrans e() -> {state} : 0\n")
    assert run("reachprod", "--bi-of", str(tmp_path / "m.wta"), str(tmp_path / "n.wta"),
               "--context", "□") == (0, "{}\n")


def test_fixtures_listing():
    code, out = run("fixtures")
    assert code == 0 and "E1max" in out.split()
