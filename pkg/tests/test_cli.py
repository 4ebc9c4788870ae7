import json
import subprocess
import sys

import pytest

from admrules.algebra import boolean, chain, format_algebra, power, read_algebras
from admrules.cli import main

DP = "p | q / p, q"
HARROP_IMPLICATION = "/ (~p -> q | r) -> (~p -> q) | (~p -> r)"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def square_file(tmp_path):
    path = tmp_path / "b2sq.alg"
    path.write_text(format_algebra(power(boolean(), 2)))
    return path


def test_parse(capsys):
    code, out, _ = run(capsys, "parse", "~p -> (q|r)", "p|q / p,q")
    assert code == 0
    assert out.splitlines() == ["~p -> q | r", DP]


def test_parse_json(capsys):
    code, out, _ = run(capsys, "parse", "--json", "p -> q -> r")
    obj = json.loads(out)
    assert obj["formula"] == "p -> q -> r" and obj["vars"] == ["p", "q", "r"]


def test_parse_error_exit_code(capsys):
    code, _, err = run(capsys, "parse", "p &")
    assert code == 2 and "column 4" in err


def test_check_dp_against_square_file(capsys, square_file, tmp_path):
    witness = tmp_path / "w.alg"
    code, out, _ = run(capsys, "check", "--json", "-a", str(square_file), "-r", DP,
                       "--emit-witness", str(witness))
    assert code == 1
    obj = json.loads(out)
    assert obj["valid"] is False
    assert obj["witness"]["valuation_labels"] == {"p": "(1,0)", "q": "(0,1)"}
    # the emitted algebra replays the refutation
    code, out, _ = run(capsys, "check", "--json", "-a", str(witness), "-r", DP)
    assert code == 1 and json.loads(out)["witness"] == obj["witness"]


def test_check_valid_rule(capsys):
    code, out, _ = run(capsys, "check", "-a", "C3xB2", "-e", "5", "-r", "p / p")
    assert code == 0 and out.startswith("valid")


def test_check_rule_file(capsys, tmp_path):
    rules = tmp_path / "r.rules"
    rules.write_text("p / p\n~~p / p\n")
    code, out, _ = run(capsys, "check", str(rules), "-a", "C3")
    assert code == 1
    assert "valid    p / p" in out and "INVALID  ~~p / p" in out


def test_check_harrop_implication_emits_witness(capsys, tmp_path):
    witness = tmp_path / "harrop.alg"
    code, _, _ = run(capsys, "check", "-e", "8", "-r", HARROP_IMPLICATION, "--emit-witness", str(witness))
    assert code == 0 and not witness.exists()
    code, out, _ = run(capsys, "check", "-e", "9", "-r", HARROP_IMPLICATION, "--emit-witness", str(witness))
    assert code == 1
    (a,) = read_algebras(witness)
    assert a.n == 9
    code, _, _ = run(capsys, "check", "-a", str(witness), "-r", HARROP_IMPLICATION)
    assert code == 1


def test_budget_exit_code(capsys):
    code, _, err = run(capsys, "check", "-a", "C3", "-r", "p | q | r | s / p", "--budget", "10")
    assert code == 3 and "budget" in err


def test_unknown_algebra(capsys):
    code, _, err = run(capsys, "check", "-a", "Z9", "-r", "p / p")
    assert code == 2 and "unknown algebra" in err


def test_enumerate(capsys, tmp_path):
    out_file = tmp_path / "algs.txt"
    code, out, _ = run(capsys, "enumerate", "4", "-o", str(out_file))
    assert code == 0
    assert [line.split("\t")[0] for line in out.splitlines()] == ["C2", "C3", "H4.0", "C4"]
    assert [a.n for a in read_algebras(out_file)] == [2, 3, 4, 4]
    code, out, _ = run(capsys, "enumerate", "6", "--json", "--well-connected")
    assert all(json.loads(line)["well_connected"] for line in out.splitlines())


def test_free(capsys):
    code, out, _ = run(capsys, "free", "-a", "C3", "-k", "1", "--json")
    obj = json.loads(out)
    assert code == 0 and obj["size"] == 6 and obj["well_connected"] is False


def test_free_cap_exit_code(capsys):
    code, _, err = run(capsys, "free", "-a", "C3", "-k", "3")
    assert code == 3 and "cap" in err


def test_admissible(capsys):
    code, out, _ = run(capsys, "admissible", "-a", "B2", "-k", "2", "-r", DP, "--json")
    obj = json.loads(out)
    assert code == 1 and obj["verdict"] == "not-admissible"
    assert obj["substitution"] == {"p": "x1", "q": "~x1"}
    code, out, _ = run(capsys, "admissible", "-a", "C3", "-k", "2", "-r", "p / p")
    assert code == 0 and "admissible up to rank 2" in out


def test_refute_derivability(capsys, tmp_path, square_file):
    base = tmp_path / "base.rules"
    base.write_text("~~p / p\np, p -> q / q\n")
    witness = tmp_path / "w.alg"
    code, out, _ = run(capsys, "refute-derivability", "--from", str(base), "-a", "B2",
                       "-a", str(square_file), "-r", DP, "--emit-witness", str(witness))
    assert code == 1 and "NOT DERIVABLE" in out
    code, _, _ = run(capsys, "check", "-a", str(witness), "-r", DP)
    assert code == 1


def test_transform(capsys, tmp_path):
    s_file = tmp_path / "s.rules"
    s_file.write_text("basis s\n")
    code, out, _ = run(capsys, "transform", str(s_file), "--to", "m")
    assert code == 0 and out == f"basis m\n{DP}\n"
    m_file = tmp_path / "m.rules"
    m_file.write_text(out)
    code, out, _ = run(capsys, "transform", str(m_file), "--to", "s", "--json")
    obj = json.loads(out)
    assert obj == {"kind": "s", "fresh": "q0", "rules": ["p | q | q0 / p | q | q0"]}
    code, _, err = run(capsys, "transform", str(s_file), "--to", "s")
    assert code == 2


def test_independence(capsys, tmp_path):
    basis = tmp_path / "b.rules"
    basis.write_text(f"{DP}\n(~~p -> p) -> p | ~p / ((~~p -> p) -> ~p) | ((~~p -> p) -> ~~p)\n")
    code, out, _ = run(capsys, "independence", str(basis), "-i", "1", "-e", "8", "--json")
    assert code == 0 and json.loads(out)["witness"]["algebra"] == "H7.0"
    code, out, _ = run(capsys, "independence", str(basis), "-t", DP, "-e", "6")
    assert code == 1 and "inconclusive" in out


def test_prove(capsys):
    assert run(capsys, "prove", "p -> q -> p")[0] == 0
    code, out, _ = run(capsys, "prove", "((p -> q) -> p) -> p", "--countermodel", "4", "--json")
    obj = json.loads(out)
    assert code == 1 and obj["theorem"] is False
    assert obj["countermodel"]["size"] == 3


def test_verify_suite_default(capsys):
    code, out, _ = run(capsys, "verify-suite")
    assert code == 0
    assert out.rstrip().endswith("12 passed, 0 failed, 0 skipped")


def test_verify_suite_sizes(capsys):
    code, out, _ = run(capsys, "verify-suite", "--only", "enumeration-counts", "--sizes", "1..6", "--json")
    lines = [json.loads(line) for line in out.splitlines()]
    (result,) = [o for o in lines if o.get("suite") == "enumeration-counts"]
    assert code == 0 and result["status"] == "pass" and "1,1,1,2,3,5" in result["note"]


def test_verify_suite_sabotaged_fixture(capsys, tmp_path):
    text = format_algebra(chain(3)).replace("imp\n2 2 2\n0 2 2", "imp\n2 2 2\n1 2 2")
    fixture = tmp_path / "bad.alg"
    fixture.write_text(text)
    code, out, _ = run(capsys, "verify-suite", "--only", "validate", "--fixture", str(fixture))
    assert code == 1
    assert "[FAIL] validate" in out and "residuation" in out


def test_verify_suite_is_deterministic_across_processes():
    cmd = [sys.executable, "-m", "admrules.cli", "verify-suite", "--seed", "7", "--json", "--jobs", "2"]
    first = subprocess.run(cmd, capture_output=True, check=False).stdout
    second = subprocess.run(cmd, capture_output=True, check=False).stdout
    assert first and first == second
