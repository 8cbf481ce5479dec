import io
import json
import subprocess
import sys

import pytest

from ffapprox import cli
from ffapprox.laurent import parse_series
from ffapprox.ring import GF, parse_poly
from ffapprox.suites import Check, SuiteReport


def run(argv, capsys, stdin=None, monkeypatch=None):
    if stdin is not None:
        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    code = cli.run(argv + ["--json"])
    out = capsys.readouterr()
    return code, json.loads(out.out), out.err


def walk(obj):
    if isinstance(obj, dict):
        for v in obj.values():
            yield from walk(v)
    elif isinstance(obj, list):
        for v in obj:
            yield from walk(v)
    else:
        yield obj


def test_cf_golden_ratio_analogue(capsys):
    code, out, _ = run(["cf", "--p", "5", "--input", "surd:(-T+sqrt(T^2+4))/2", "--verify-quality", "3"], capsys)
    assert code == 0 and out["schema"] == 1
    assert out["status"] == "periodic" and out["period"] == 1 and out["preperiod"] == 1
    assert out["period_quotients"] == ["T"]
    assert out["tau_exp"] == {"kind": "finite", "exp": 1}
    assert all(q["equality"] and q["best_ok"] for q in out["quality"])


def test_cf_series_input(capsys):
    code, out, _ = run(["cf", "--p", "3", "--input", "rat:(T^2+1)/T"], capsys)
    assert code == 0 and out["status"] == "complete-rational" and out["quotients"] == ["T", "T"]
    assert out["tau_exp"]["kind"] == "zero"


def test_approx_tightness(capsys):
    code, out, _ = run(["approx", "--p", "3", "--h", "2", "--theta", "rat:1/T^2@10"], capsys)
    assert code == 0
    assert out["x"] == "1" and out["tight"] and out["verified"]


def test_approx_simultaneous(capsys):
    code, out, _ = run(["approx", "--p", "5", "--h", "3", "--theta", "surd:(0+sqrt(T^2+1))/1",
                        "--theta", "surd:(0+sqrt(T^2+2))/1"], capsys)
    assert code == 0 and out["mode"] == "simultaneous" and out["verified"]


def test_malformed_polynomial(capsys):
    code, out, err = run(["approx", "--p", "3", "--h", "2", "--theta", "T^2+*1"], capsys)
    assert code == 2
    assert out["error"]["kind"] == "ParseError" and "position" in out["error"]["message"]
    assert "position" in err


def test_precision_deficit_exit(capsys):
    code, out, _ = run(["approx", "--p", "3", "--h", "5", "--theta", "ser:1:1,2@4"], capsys)
    assert code == 3 and "deficit" in out["error"]["message"]


def test_no_solution_exit(tmp_path, capsys):
    inst = {"p": 3, "A": [["1", "0"], ["0", "1"]], "r": [1, 1], "deg_bounds": [2, 2]}
    path = tmp_path / "inst.json"
    path.write_text(json.dumps(inst))
    code, out, _ = run(["solve-gamma", "--input", str(path)], capsys)
    assert code == 4 and out["error"]["kind"] == "NoSolutionError"


def test_solve_gamma_from_stdin(capsys, monkeypatch):
    inst = {"p": 3, "prec": 12, "A": [["surd:(0+sqrt(T^2+1))/1", "1"], ["1", "0"]], "r": [3, -2],
            "deg_bounds": [2, 3]}
    code, out, _ = run(["solve-gamma", "--input", "-"], capsys, json.dumps(inst), monkeypatch)
    assert code == 0 and out["verified"]


def test_bad_json(capsys, monkeypatch):
    code, out, _ = run(["solve-gamma", "--input", "-"], capsys, "{nope", monkeypatch)
    assert code == 2


def test_verification_failure_exit(capsys, monkeypatch):
    import ffapprox.suites as suites

    monkeypatch.setattr(suites, "run_suite",
                        lambda name, p, d, seed, jobs=1: SuiteReport(name, p, d, seed, [Check("x", False)]))
    code, out, _ = run(["verify", "--suite", "mahler"], capsys)
    assert code == 5 and out["failed"] == 1


def test_general_then_transfer(tmp_path, capsys, monkeypatch):
    code, sol, _ = run(["approx-general", "--p", "5", "--h", "2",
                        "--row", "surd:(0+sqrt(T^2+2))/T; rat:1/(T+1)",
                        "--row", "ser:1:1,2,3,4,1,2,3,4,1,2,3,4,1,2,3,4,1,2,3,4@21; T"], capsys)
    assert code == 0 and sol["verified"]
    code, cert, _ = run(["transfer", "--input", "-"], capsys, json.dumps(sol), monkeypatch)
    assert code == 0
    assert cert["D_exp"] >= 1 and cert["Y_exp"] >= 0


def test_general_flexible(capsys):
    code, out, _ = run(["approx-general", "--p", "3", "--row", "surd:(0+sqrt(T^2+1))/T; surd:(T+sqrt(T^2+2))/1",
                        "--t", "2,1,1", "--delta", "1"], capsys)
    assert code == 0 and out["targets"] == [4] and out["verified"]


def test_transpose(capsys):
    code, out, _ = run(["approx-transpose", "--p", "3", "--h", "1", "--theta", "surd:(0+sqrt(T^2+1))/1",
                        "--theta", "rat:1/(T^3+T+1)"], capsys)
    assert code == 0 and out["target_exp"] == 4 and out["verified"]


@pytest.mark.parametrize("op,key", [("sigma", "sigma_exp"), ("tau", "tau_exp"), ("D", "D"), ("automorph", "automorph")])
def test_form_ops(op, key, capsys):
    code, out, _ = run(["form", "--p", "3", "--f", "1;T^2+1;-1", "--op", op], capsys)
    assert code == 0 and key in out
    if op == "tau":
        assert out["tau_exp"] == 2


def test_estimate_b(capsys):
    code, out, _ = run(["estimate-b", "--p", "3", "--theta", "rat:1/T", "--theta", "surd:(0+sqrt(T^2+1))/1",
                        "--max-deg", "3"], capsys)
    assert code == 0 and out["exact_zero"] and out["value"] is None
    code, out, _ = run(["estimate-b", "--p", "3", "--lam", "3/2", "--theta", "surd:(0+sqrt(T^2+1))/1",
                        "--max-deg", "3"], capsys)
    assert code == 0 and out["lambda"] == {"num": 3, "den": 2}


@pytest.mark.parametrize("suite", ["dirichlet", "lower", "quadform", "mahler", "transfer"])
def test_verify_suites(suite, capsys):
    code, out, _ = run(["verify", "--suite", suite, "--p", "3", "--max-deg", "3"], capsys)
    assert code == 0 and out["passed"] and out["total"] > 0


def test_no_floats_and_roundtrip(capsys):
    code, out, _ = run(["cf", "--p", "3", "--input", "surd:(T+sqrt(T^2+2))/T", "--verify-quality", "2"], capsys)
    assert not any(isinstance(v, float) for v in walk(out))
    F = GF(3)
    for q in out["quotients"]:
        assert str(parse_poly(q, F)) or True
    for P, Q in out["convergents"]:
        parse_poly(P, F), parse_poly(Q, F)
    code, out, _ = run(["approx", "--p", "3", "--h", "3", "--theta", "surd:(0+sqrt(T^2+1))/1"], capsys)
    for t in out["thetas"]:
        parse_series(t, F)
    assert parse_poly(out["x"], F)


def test_determinism(capsys):
    argv = ["verify", "--suite", "dirichlet", "--p", "5", "--max-deg", "3"]
    cli.run(argv + ["--json"])
    a = capsys.readouterr().out
    cli.run(argv + ["--json"])
    b = capsys.readouterr().out
    assert a == b


def test_text_output(capsys):
    assert cli.run(["form", "--p", "5", "--f", "1;T;-1", "--op", "tau"]) == 0
    text = capsys.readouterr().out
    assert "tau_exp: 1" in text and "schema: 1" in text


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "ffapprox", "cf", "--p", "5", "--input", "surd:(-T+sqrt(T^2+4))/2",
                        "--json"], capture_output=True, text=True)
    assert r.returncode == 0 and json.loads(r.stdout)["period"] == 1
    r = subprocess.run([sys.executable, "-m", "ffapprox", "cf"], capture_output=True, text=True)
    assert r.returncode == 2
