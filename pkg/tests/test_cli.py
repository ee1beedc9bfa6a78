import json

import pytest

from monadlab.cli import EXIT_INPUT, EXIT_MATH, EXIT_NONCONVERGENCE, EXIT_OK, main
from monadlab.io import save_tensor
from monadlab.tensors import ATensor


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_gen_and_audit(tmp_path, capsys):
    a = str(tmp_path / "a.json")
    code, rep = run(capsys, "gen", "slice", "--k", "3", "--seed", "2", "--out", a)
    assert code == EXIT_OK and rep["results"]["certificate"]["is_instanton"]
    code, rep = run(capsys, "audit", "--in", a)
    assert code == EXIT_OK
    assert rep["results"]["audit"]["moduli_tangent_dim"] == 21
    code, rep = run(capsys, "audit", "--in", a, "--backend", "float")
    assert code == EXIT_OK and rep["results"]["audit"]["xi_corank"] == 0


def test_audit_generated_k5(capsys):
    code, rep = run(capsys, "audit", "--k", "5", "--seed", "7")
    assert code == EXIT_OK
    assert rep["results"]["audit"]["moduli_tangent_dim"] == 37


def test_certify_zero_exits_1(tmp_path, capsys):
    z = str(tmp_path / "zero.json")
    save_tensor(z, ATensor.zeros(2))
    code, rep = run(capsys, "certify", "--in", z, "--seed", "0")
    assert code == EXIT_MATH
    assert rep["results"]["certificate"]["e1_witness"] is not None


def test_uncertified_audit_is_invalid_input(tmp_path, capsys):
    z = str(tmp_path / "zero.json")
    save_tensor(z, ATensor.zeros(2))
    code, _ = run(capsys, "audit", "--in", z)
    assert code == EXIT_INPUT


def test_malformed_inputs(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("[]")
    assert run(capsys, "certify", "--in", str(bad), "--seed", "0")[0] == EXIT_INPUT
    assert run(capsys, "certify", "--in", str(tmp_path / "missing.json"), "--seed", "0")[0] == EXIT_INPUT
    assert main(["certify", "--in", str(bad)]) == EXIT_INPUT   # seed is mandatory
    capsys.readouterr()
    assert run(capsys, "gen", "slice", "--k", "9", "--seed", "0")[0] == EXIT_INPUT


def test_non_convergence_exit_3(capsys):
    code, rep = run(capsys, "gen", "newton", "--k", "4", "--seed", "0", "--max-iter", "0")
    # Restarts without iterations cannot reach the variety.
    assert code == EXIT_NONCONVERGENCE


def test_planted_trace(tmp_path, capsys):
    s, a = str(tmp_path / "s.json"), str(tmp_path / "a.json")
    assert run(capsys, "gen-s", "--k", "3", "--rank", "2", "--bias", "a", "--seed", "1", "--out", s)[0] == 0
    assert run(capsys, "synth", "--s", s, "--seed", "1", "--out", a)[0] == 0
    code, rep = run(capsys, "trace", "--a", a, "--s", s, "--seed", "0")
    assert code == EXIT_OK
    assert rep["results"]["trace"]["case"] in ("I", "II", "III", "E3", "rank-bound")
    code, rep = run(capsys, "classify", "--in", s, "--seed", "0")
    assert code == EXIT_OK and rep["results"]["classification"]["case"] == "cond1"


def test_planes_on_k2(tmp_path, capsys):
    a = str(tmp_path / "a.json")
    run(capsys, "gen", "slice", "--k", "2", "--seed", "0", "--out", a)
    code, rep = run(capsys, "planes", "--in", a, "--seed", "0", "--planes", "50")
    assert code == EXIT_OK
    assert rep["results"]["probe"]["verdict"] == "dim>=2"
    assert rep["results"]["quadric"]["residual"] <= 1e-8


def test_quick_suite_is_deterministic(tmp_path, capsys):
    report = tmp_path / "r.json"
    args = ["--no-timings", "--report", str(report), "suite", "--quick", "--seed", "3",
            "--workers", "1", "--k-range", "2-3", "--only", "1,3,5,6,10", "--quiet"]
    assert main(args) == EXIT_OK
    first = report.read_text()
    assert main(args) == EXIT_OK
    capsys.readouterr()
    assert report.read_text() == first
    assert json.loads(first)["summary"]["passed"]


def test_suite_bad_range(capsys):
    assert run(capsys, "suite", "--seed", "0", "--k-range", "0-9")[0] == EXIT_INPUT
