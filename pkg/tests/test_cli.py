from __future__ import annotations

import json
import pathlib

import mpmath
import pytest

from pcfvar import cli
from pcfvar.contmat import PCF
from pcfvar.experiment import degeneracy_scan, pell_bijection_report
from pcfvar.hurwitz import nicf_expand
from pcfvar.literals import parse_quad, parse_ring, parse_value
from pcfvar.pcf import evaluate

GOLDEN = pathlib.Path(__file__).parent / "golden"
CASES = json.loads((GOLDEN / "cases.json").read_text())


def run(capsys, *argv):
    code = cli.run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden_outputs(capsys, name):
    case = CASES[name]
    code, out, _ = run(capsys, *case["argv"])
    assert code == case["exit"]
    assert out == (GOLDEN / f"{name}.jsonl").read_text()


def test_spec_examples(capsys):
    code, out, _ = run(capsys, "eval", "--pcf", "[1; 2]", "--ring", "Z")
    assert code == 0 and json.loads(out)["value_exact"] == "sqrt(2)"
    code, out, _ = run(capsys, "quad", "--pcf", "[; 1]")
    assert code == 0 and json.loads(out)["quad"] == [1, -1, -1]
    code, out, _ = run(capsys, "factor", "--matrix", "1,0,0,1", "--N", "0", "--k", "2", "--H", "5")
    assert code == 0 and out.splitlines() == ['"(0,0)"']


def test_gauss_golden_value_is_right(capsys):
    code, out, _ = run(capsys, "expand-gauss", "--ring", "O(-1)", "--value", "(1+sqrt(-7))/2")
    e = json.loads(out)
    R = parse_ring("O(-1)")
    p = PCF(R, [parse_value(x, R) for x in e["preperiod"]], [parse_value(x, R) for x in e["period"]])
    with mpmath.workdps(40):
        target = (1 + mpmath.sqrt(-7)) / 2
        assert abs(evaluate(p).numeric - target) < 1e-25


def test_outputs_equal_library_calls(capsys):
    _, out, _ = run(capsys, "scan-degenerate", "--quad", "1,-1,-1", "--N", "0", "--k", "3", "--H", "6")
    assert json.loads(out) == degeneracy_scan(parse_quad("1,-1,-1"), 0, 3, 6).to_json()
    _, out, _ = run(capsys, "pell-check", "--alpha", "5", "--k", "2", "--H", "200")
    assert json.loads(out) == pell_bijection_report(5, 2, 200).to_json()
    _, out, _ = run(capsys, "expand", "--value", "(3+sqrt(13))/2")
    assert json.loads(out) == nicf_expand(parse_value("(3+sqrt(13))/2")).to_json()


def test_jobs_do_not_change_output(capsys):
    args = ["factor", "--matrix=-106,-19,-39,-7", "--N", "0", "--k", "4", "--H", "5"]
    _, one, _ = run(capsys, *args)
    _, many, _ = run(capsys, *args, "--jobs", "3")
    assert one == many and one


@pytest.mark.parametrize(
    "argv",
    [
        ["bogus"],
        ["eval"],
        ["eval", "--pcf", "garbage"],
        ["eval", "--pcf", "[1;2]", "--ring", "Q"],
        ["factor", "--matrix", "1,0,0,2", "--N", "0", "--k", "2", "--H", "5"],
        ["mset", "--ring", "Z[i]", "--bound", "1"],
        ["fiber", "--fp", "1,2,1,2", "--quad", "1,0,-2", "--N", "1", "--k", "1", "--H", "5"],
        ["fp-points", "--quad", "1,0,-3", "--k", "1", "--ring", "Z[sqrt(2)]"],
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 2


def test_assertion_failure_exit_1(capsys):
    code, out, _ = run(capsys, "eval", "--pcf", "[; 1,-1]")
    assert code == 1 and json.loads(out)["converged"] is False
    code, out, _ = run(capsys, "density-cert", "--quad", "1,0,-3", "--ring", "Z[sqrt(2)]", "--N", "1", "--k", "2",
                       "--unit-gen", "sqrt(3)+sqrt(2)", "--unit-gen", "2+sqrt(3)")
    assert code == 1 and json.loads(out)["certified"] is False


def test_density_cert_success(capsys):
    code, out, _ = run(capsys, "density-cert", "--quad", "1,0,-3", "--ring", "Z[sqrt(2)]", "--N", "1", "--k", "3",
                       "--degree", "2", "--unit-gen", "sqrt(3)+sqrt(2)", "--unit-gen", "2+sqrt(3)")
    res = json.loads(out)
    assert code == 0 and res["certified"] and res["monomial_count"] == 15


def test_budget_exit_3(capsys, monkeypatch):
    monkeypatch.setenv("PCFVAR_NODE_LIMIT", "10")
    code, _, err = run(capsys, "scan-degenerate", "--quad", "1,0,-2", "--N", "1", "--k", "3", "--H", "8")
    assert code == 3 and "budget" in err
    code, _, _ = run(capsys, "expand", "--value", "sqrt(1000003)", "--max-steps", "2")
    assert code == 3


def test_config_file_supplies_ring_and_generators(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text('ring = "Z[sqrt(2)]"\nunit_generators = ["sqrt(3)+sqrt(2)"]\n')
    out_path = tmp_path / "out.jsonl"
    code, out, _ = run(capsys, "fp-points", "--quad", "1,0,-3", "--k", "1", "--count", "2",
                       "--config", str(cfg), "--output", str(out_path))
    assert code == 0 and out == ""
    lines = [json.loads(x) for x in out_path.read_text().splitlines()]
    assert lines[0]["fp"] == "(w,3,1,w)"


def test_verify_suite_subset(capsys):
    code, out, err = run(capsys, "verify-suite", "--only", "1,12")
    res = json.loads(out)
    assert code == 0 and res["passed"] == 2 and "PASS criterion  1" in err


def test_help_documents_flags(capsys):
    for sub in ("scan-degenerate", "density-cert", "factor"):
        code, out, _ = run(capsys, sub, "--help")
        assert code == 0
        for flag in ("--config", "--jobs", "--ring", "--output"):
            assert flag in out
