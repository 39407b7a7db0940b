import json
import subprocess
import sys

import pytest

from k0calc.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def report(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


def test_decide(capsys):
    r = report(capsys, "--char", "5", "decide", "A a. E x. x^2 = a")
    assert r["result"] == {"verdict": True}
    assert r["schema"] == "k0calc.report/1" and r["free_vars"] == []


def test_decide_false_is_exit_zero(capsys):
    r = report(capsys, "--char", "5", "decide", "E x. x^2 = 2 & x^3 = 2")
    assert r["result"]["verdict"] is False


def test_count(capsys):
    r = report(capsys, "--char", "7", "count", "y^2 = x^3", "--ext", "1")
    assert r["result"]["count"] == 7
    assert r["free_vars"] == ["y", "x"]


def test_compare_distinct(capsys):
    r = report(capsys, "--char", "2", "--vars", "x", "compare", "x != 0", "0 = 0")
    assert r["result"]["verdict"] == "Distinct" and r["result"]["k"] == 1
    assert r["result"]["counts"] == [1, 2]
    assert r["provenance"]["branch"] == "count"


def test_compare_equal_via_scissor(capsys):
    r = report(capsys, "--char", "3", "compare", "x*y = 0", "x = 0 | y = 0")
    assert r["result"]["verdict"] == "Equal"
    assert r["provenance"]["branch"] == "scissor"


def test_class_report(capsys):
    r = report(capsys, "--char", "5", "class", "x^2 + y^2 = 1")
    t = r["result"]["table"]
    assert t["counts"] == [4, 24, 124] and t["fit"] == {"coeffs": [-1, 1]} and t["euler"] == 0
    assert t["qpoly"] == "q - 1"


def test_qe_report(capsys):
    r = report(capsys, "--char", "3", "qe", "E x. x*t = 1")
    assert r["free_vars"] == ["t"]
    assert r["result"]["formula"] == "t != 0"


def test_trace_flag(capsys):
    r = report(capsys, "qe", "E x. a*x + b = 0", "--trace")
    assert r["provenance"]["trace"]
    code, out, _ = run(capsys, "--format", "text", "--trace", "qe", "E x. a*x + b = 0")
    assert code == 0 and out.startswith("command: qe")


def test_text_format(capsys):
    code, out, _ = run(capsys, "--char", "7", "--format", "text", "count", "y^2 = x^3")
    assert code == 0
    assert "count: 7" in out.splitlines()


def test_parse_error_exit_2(capsys):
    code, out, err = run(capsys, "decide", "E x. x = = 1")
    assert code == 2 and not out
    e = json.loads(err)
    assert e["error"] == "ParseError" and "column" in e["message"]


def test_not_a_sentence_exit_2(capsys):
    code, _, err = run(capsys, "decide", "x = 1")
    assert code == 2 and json.loads(err)["error"] == "NotASentence"


def test_bad_char_exit_2(capsys):
    code, _, _ = run(capsys, "--char", "4", "decide", "E x. x = 1")
    assert code in (2, 3)


def test_budget_exit_3(capsys):
    code, _, err = run(capsys, "--char", "31", "--budget", "1000", "count", "x + y + z + w = 0")
    assert code == 3
    assert json.loads(err)["error"] == "SizeLimit"


def test_count_char_zero_exit_2(capsys):
    code, _, err = run(capsys, "count", "x = 1")
    assert code == 2 and json.loads(err)["error"] == "CharZeroUnsupported"


def test_certify_and_registry(capsys, tmp_path):
    reg = tmp_path / "reg.jsonl"
    r = report(capsys, "--char", "3", "--registry", str(reg), "--append-registry", "certify",
               "y^2 = x^3", "t = t", "x = t^2 & y = t^3", "--source-vars", "x,y", "--target-vars", "t")
    assert r["result"]["verified"] is True and r["provenance"]["appended"]
    assert len(reg.read_text().splitlines()) == 1
    r = report(capsys, "--char", "3", "--registry", str(reg), "compare", "y^2 = x^3", "0 = 0", "--vars-b", "t")
    assert r["result"]["verdict"] == "Equal"
    assert r["provenance"]["branch"] == "registry" and r["provenance"]["registry_size"] == 1


def test_certify_failure_is_a_result(capsys):
    r = report(capsys, "certify", "x = x", "t != 0", "x = t", "--source-vars", "x", "--target-vars", "t")
    assert r["result"]["verified"] is False
    assert r["result"]["failed_check"] in ("membership", "totality", "surjectivity")


def test_append_needs_path(capsys):
    code, _, _ = run(capsys, "--append-registry", "certify", "x = 0", "y = 0", "x = 0 & y = 0")
    assert code == 2


def test_corrupt_registry(capsys, tmp_path):
    reg = tmp_path / "bad.jsonl"
    reg.write_text('{"phi": "x = 0", "psi": "y = 0", "eta": "y = x^2 & x = 0", "source_vars": ["x"], '
                   '"target_vars": ["y"], "char": 0}\n')
    code, _, _ = run(capsys, "--registry", str(reg), "compare", "x = 0", "x = 0")
    assert code == 0
    reg.write_text('{"phi": "x = x", "psi": "y = y", "eta": "y = x^2", "source_vars": ["x"], '
                   '"target_vars": ["y"], "char": 0}\n')
    code, _, err = run(capsys, "--registry", str(reg), "compare", "x = 0", "x = 0")
    assert code == 2


def test_fibcheck(capsys):
    r = report(capsys, "--char", "2", "--max-ext", "2", "fibcheck", "a*x = 1", "1", "1")
    res = r["result"]
    assert res["pass"] is True and res["ambient_check"]["pass"] is False
    assert res["base"] == "{ ; a != 0}"
    r = report(capsys, "--char", "3", "--vars", "y,x", "--max-ext", "2", "fibcheck", "0 = 0", "1", "L")
    assert r["result"]["pass"] is True


def test_fibcheck_bad_fiber(capsys):
    code, _, _ = run(capsys, "--char", "2", "fibcheck", "a*x = 1", "1", "T + 1")
    assert code == 2


def test_vars_must_cover_free_vars(capsys):
    code, _, _ = run(capsys, "--char", "2", "--vars", "x", "count", "x*y = 1")
    assert code == 2


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "k0calc", "--char", "7", "count", "y^2 = x^3"],
                         capture_output=True, text=True, check=True)
    assert json.loads(out.stdout)["result"]["count"] == 7


@pytest.mark.parametrize("args", [
    ["--char", "5", "class", "x^2 + y^2 = 1"],
    ["--char", "3", "compare", "x*y = 1", "x != 0"],
])
def test_deterministic_output(args):
    outs = {subprocess.run([sys.executable, "-m", "k0calc", *args], capture_output=True, check=True,
                           env={"PYTHONHASHSEED": str(seed), "PATH": "/usr/bin:/bin"}).stdout
            for seed in (1, 2, 3)}
    assert len(outs) == 1
