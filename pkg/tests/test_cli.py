import json
import subprocess
import sys

import mpmath
import pytest

from smalldiv.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


def test_cf_golden(capsys):
    d = run_json(capsys, "cf", "surd:(-1+sqrt(5))/2", "--depth", "6", "--json")
    assert d["a"] == [0, 1, 1, 1, 1, 1, 1]
    assert d["q"] == [1, 1, 2, 3, 5, 8, 13]
    assert d["invariant_violations"] == []


def test_cf_digits_carry_declared_precision(capsys):
    d = run_json(capsys, "cf", "golden", "--depth", "2", "--precision", "200")
    with mpmath.workprec(260):
        g = (mpmath.sqrt(5) - 1) / 2
        assert abs(mpmath.mpf(d["beta"][0]) - g) < mpmath.mpf(2) ** -195


def test_cf_csv_header(capsys):
    code, out, _ = run(capsys, "cf", "golden", "--depth", "3", "--csv")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "# precision_bits=128"
    assert lines[1] == "n,a,p,q,beta"


def test_cf_branch_and_best(capsys):
    d = run_json(capsys, "cf", "--branch", "1,1")
    assert (d["lo"], d["hi"]) == ("1/2", "2/3")
    d = run_json(capsys, "cf", "golden", "--depth", "8", "--best", "1/2", "--dist", "3")
    assert d["best_approximation"] is True
    assert d["dist"]["3"].startswith("0.1458980337")


def test_yoccoz_series(capsys):
    d = run_json(capsys, "yoccoz", "--series", "11")
    assert d["coefficients"][-1] == "559/32768"
    assert d["coefficients"][:4] == ["1/2", "-1/8", "-1/8", "-1/16"]


def test_yoccoz_at_origin(capsys):
    d = run_json(capsys, "yoccoz", "--at", "0,0")
    assert float(d["u"]["re"]) == 0.5


def test_brjuno_exact_periodic(capsys):
    d = run_json(capsys, "brjuno", "golden", "--exact-periodic", "--precision", "160")
    with mpmath.workprec(200):
        g = (mpmath.sqrt(5) - 1) / 2
        closed = -mpmath.log(g) / (1 - g)
        assert abs(mpmath.mpf(d["exact_periodic"]["value"]) - closed) < mpmath.mpf(2) ** -150


def test_linearize_exact_rationals(capsys):
    germ = json.dumps({"lambda": "1/3", "coefficients": ["2", "-1/5"]})
    d = run_json(capsys, "linearize", germ, "--order", "3")
    assert d["h"][:3] == ["0", "1", "-9"]
    assert d["residual_order"] == 3


def test_normal_form(capsys):
    germ = json.dumps({"lambda": "root:1/2", "coefficients": [0, -1, 0, -3]})
    d = run_json(capsys, "normal-form", germ, "--q", "2", "--order", "6")
    nf = d["normal_form"]
    assert (nf["n"], nf["a"]["re"], nf["b"]["re"]) == (1, "1", "3")


def test_davie_sets_and_K(capsys):
    d = run_json(capsys, "davie", "golden", "--N", "20", "--sets", "3", "--K", "1")
    assert d["sets"]["A_k"] == [0, 13]
    assert d["sets"]["g_k"][0] == "0"
    assert d["violations"] == []
    assert float(d["K"]["lo"]) <= 2.77258872223978 + 1e-12


def test_davie_k_max(capsys):
    code, _, err = run(capsys, "davie", "golden", "--N", "100", "--k-max", "3")
    assert code == 3 and "k-max" in err


def test_cremer(capsys):
    d = run_json(capsys, "cremer", "--alpha", "quot:0;1,1,1000,(1)", "--order", "40")
    assert d["lower_bound_holds"] is True


def test_torus_solve_and_classify(capsys):
    field = json.dumps({"dim": 2, "modes": [{"k": [1, -2], "re": "1", "im": "0"}]})
    d = run_json(capsys, "torus", field, "--mu", "golden", "--solve")
    assert d["solution"]["scale"] == -1
    d = run_json(capsys, "torus", "--classify", "golden", "--N", "10000")
    assert d["verdict"] == "distribution-consistent"


def test_torus_resonant_mode_is_precondition(capsys):
    field = json.dumps({"dim": 2, "modes": [{"k": [1, -2], "re": "1", "im": "0"}]})
    code, _, _ = run(capsys, "torus", field, "--mu", "1,1/2", "--solve")
    assert code == 2


def test_exit_codes(capsys, monkeypatch):
    assert run(capsys, "frobnicate")[0] == 64
    assert run(capsys, "cf", "surd:((")[0] == 65
    assert run(capsys, "cf", "golden", "--depth", "x")[0] == 65
    assert run(capsys, "cf", "rat:1/3", "--depth", "5")[0] == 3
    assert run(capsys, "brjuno", "e", "--exact-periodic")[0] == 2
    assert run(capsys, "yoccoz", "--at", "0.9999999,0", "--tol", "1e-14", "--max-steps", "100")[0] == 3
    monkeypatch.setenv("SMALLDIV_PRECISION", "lots")
    assert run(capsys, "cf", "golden")[0] == 65


def test_low_precision_rejected(capsys):
    assert run(capsys, "cf", "golden", "--precision", "20")[0] in (2, 65)


def test_determinism(capsys):
    argv = ["linearize", json.dumps({"lambda": "2/5", "coefficients": ["1/2", "-3", "1/7"]}), "--order", "12"]
    a = run(capsys, *argv)[1]
    b = run(capsys, *argv)[1]
    assert a == b and a


def test_out_path(capsys, tmp_path):
    target = tmp_path / "cf.json"
    code, out, _ = run(capsys, "cf", "golden", "--depth", "4", "--out", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["q"][-1] == 5


def test_selftest_module_entry():
    proc = subprocess.run([sys.executable, "-m", "smalldiv", "selftest"], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stdout + proc.stderr
    assert "selftest passed" in proc.stdout
