import json

import pytest

from kdirac.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_complex_k2(capsys):
    code, out, _ = run(capsys, "verify", "complex", "--k", "2", "--n", "4", "--degree", "3",
                       "--trials", "10", "--seed", "7")
    assert code == 0 and out.rstrip().endswith("PASS")


@pytest.mark.parametrize("argv", [
    ["verify", "complex", "--k", "2", "--n", "5"],
    ["verify", "complex", "--k", "3", "--n", "4"],
    ["verify", "complex", "--k", "4"],
    ["verify", "complex", "--trials", "0"],
    ["verify", "symbol", "--samples", "0"],
    ["verify"],
    ["casimir", "--k", "2", "--lambda", "5/2,x"],
    ["casimir", "--k", "2", "--lambda", "5/2,3/2,1"],
    ["casimir", "--k", "2", "--lambda", "5/2,3/2", "--i", "2", "--j", "1"],
    ["klimyk", "--k", "3", "--lambda", "2,1"],
    ["klimyk", "--k", "2", "--lambda", "0,1"],
    ["splitting", "--n", "3"],
    ["nonsense"],
])
def test_usage_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert "usage error" in err


def test_verify_complex_k3_printed(capsys, tmp_path):
    path = tmp_path / "k3.json"
    code, _, _ = run(capsys, "verify", "complex", "--k", "3", "--n", "6", "--degree", "2",
                     "--trials", "5", "--seed", "1", "--json", str(path))
    data = json.loads(path.read_text())
    # degree 2 lies below the order of every k = 3 composite
    assert code == 0 and data["status"] == "PASS"


def test_verify_symbol_k2(capsys, tmp_path):
    path = tmp_path / "sym.json"
    code, _, _ = run(capsys, "verify", "symbol", "--k", "2", "--n", "4", "--samples", "50",
                     "--seed", "3", "--json", str(path))
    assert code == 0
    assert json.loads(path.read_text())["notes"]["samples_used"] == 50


def test_casimir_example(capsys):
    code, out, _ = run(capsys, "casimir", "--k", "2", "--n", "4", "--lambda", "5/2,3/2",
                       "--i", "1", "--j", "2")
    assert code == 0
    assert "alpha_ij = 0: True" in out
    for name in ("alpha_i_S", "alpha_j_S", "alpha_i_T", "alpha_j_T", "alpha_ij"):
        assert name in out


def test_casimir_nonzero_is_finding(capsys):
    code, out, _ = run(capsys, "casimir", "--k", "2", "--n", "4", "--lambda", "3/2,3/2")
    assert code == 1 and "alpha_ij = 0: False" in out


def test_klimyk_example(capsys):
    code, out, _ = run(capsys, "klimyk", "--k", "3", "--lambda", "2,1,0", "--i", "1", "--j", "2")
    assert code == 0 and "multiplicity = 1" in out


def test_splitting_n6(capsys):
    code, out, _ = run(capsys, "splitting", "--n", "6", "--degree", "2", "--trials", "2", "--seed", "9")
    assert code == 0 and "global scalar" in out


def test_splitting_n4_reports_vanishing(capsys, tmp_path):
    # at n = 4 two middle alphas coincide and the derived operator is identically zero
    path = tmp_path / "s.json"
    code, _, _ = run(capsys, "splitting", "--n", "4", "--degree", "2", "--trials", "5", "--seed", "9",
                     "--json", str(path))
    data = json.loads(path.read_text())
    assert code == 1
    assert data["findings"]
    assert data["notes"]["coincident_alphas"] == [["iS", "jT"]]


@pytest.mark.parametrize("argv", [
    ["verify", "complex", "--k", "2", "--n", "4", "--degree", "2", "--trials", "3", "--seed", "5"],
    ["verify", "symbol", "--k", "2", "--n", "4", "--samples", "5", "--seed", "5"],
    ["splitting", "--n", "6", "--degree", "2", "--trials", "1", "--seed", "5"],
])
def test_json_is_byte_identical(capsys, tmp_path, argv):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(capsys, *argv, "--json", str(a))
    run(capsys, *argv, "--json", str(b))
    assert a.read_bytes() == b.read_bytes()
