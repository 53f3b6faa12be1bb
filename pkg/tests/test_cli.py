import json
import subprocess
import sys
from pathlib import Path

import pytest

from polysym.cli import main
from polysym.dsl import parse_expr
from polysym.engine import BIADD
from polysym.models import MODELS, TARGETS

ROOT = Path(__file__).resolve().parent.parent
SCRIPTS = ROOT / "scripts"
GOLDEN = Path(__file__).resolve().parent / "golden"
RECORD_KEYS = {"check", "status", "samples", "witness"}


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def records(out):
    return [json.loads(line) for line in out.splitlines()]


# -- golden files ----------------------------------------------------------------------------

GOLDEN_RUNS = {
    "symmetrize_mult.txt": ["symmetrize", "--input", SCRIPTS / "mult.eq"],
    "symmetrize_add.txt": ["symmetrize", "--input", SCRIPTS / "add.eq"],
    "specialize_mult.txt": ["specialize", "--input", SCRIPTS / "mult.eq"],
    "specialize_add.ndjson": ["specialize", "--input", SCRIPTS / "add.eq", "--format", "json"],
    "verify_pi2_second-order-dd.ndjson": ["verify", "pi2", "--model", "second-order-dd",
                                          "--format", "json"],
    "verify_mult_deriv-square.ndjson": ["verify", "mult", "--model", "deriv-square",
                                        "--format", "json"],
    "moments_rank1.ndjson": ["moments", "--rank", 1, "--bound", 2, "--format", "json"],
}


@pytest.mark.parametrize("name", sorted(GOLDEN_RUNS))
def test_golden_output(capsys, name):
    _, out, _ = run(capsys, *GOLDEN_RUNS[name])
    assert out == (GOLDEN / name).read_text()


def test_golden_symmetrize_mult_is_the_six_term_form():
    text = (GOLDEN / "symmetrize_mult.txt").read_text().split(": ", 1)[1]
    expected = parse_expr("B(x1*x2, x3*x4) + B(x1*x3, x2*x4) + B(x1*x4, x2*x3)"
                          " - B(x1, x2)*B(x3, x4) - B(x1, x3)*B(x2, x4) - B(x1, x4)*B(x2, x3)",
                          BIADD)
    assert parse_expr(text, BIADD) * 3 == expected


def test_golden_specialize_add_gives_bilinear_form():
    rec = records((GOLDEN / "specialize_add.ndjson").read_text())
    assert parse_expr(rec[0]["result"], BIADD) == parse_expr("-B(1, 1)", BIADD)
    form = parse_expr(rec[1]["result"], BIADD)
    assert form.primitive() == parse_expr("B(x, y) - 2*x*a(y) - 2*y*a(x) + a(x*y)", BIADD)


# -- symmetrize --------------------------------------------------------------------------------------

def test_symmetrize_degree_three_example(capsys):
    code, out, _ = run(capsys, "symmetrize", "--expr", "biadditive B; eq e: B(x,x)*x = 0;"
                       " degree e 3;")
    assert code == 0
    result = parse_expr(out.split(": ", 1)[1], BIADD)
    assert result == parse_expr("1/3*(x1*B(x2, x3) + x2*B(x1, x3) + x3*B(x1, x2))", BIADD)


def test_symmetrize_json_schema(capsys):
    code, out, _ = run(capsys, "symmetrize", "--input", SCRIPTS / "add.eq", "--format", "json")
    assert code == 0
    (rec,) = records(out)
    assert rec["equation"] == "add" and rec["degree"] == 4 and "B(x1*x2, x3*x4)" in rec["result"]


def test_degree_flag_overrides(capsys):
    code, out, _ = run(capsys, "symmetrize", "--expr", "eq e: x^2 = 0;", "--degree", "2")
    assert code == 0 and out == "e: x1*x2\n"


def test_non_homogeneous_is_rejected(capsys):
    code, out, err = run(capsys, "symmetrize", "--expr", "eq e: x^2 + x = 0; degree e 2;")
    assert code == 2 and out == ""
    assert "not homogeneous" in err and "k=2" in err


# -- verify --------------------------------------------------------------------------------------

@pytest.mark.parametrize("target,model", [("pi2", "second-order-dd"), ("mult", "norm-sqrt2"),
                                          ("classical", "d"), ("order2", "combo")])
def test_verify_passes(capsys, target, model):
    code, out, _ = run(capsys, "verify", target, "--model", model, "--format", "json",
                       "--samples", 10)
    assert code == 0
    for rec in records(out):
        assert set(rec) == RECORD_KEYS and rec["status"] == "pass" and rec["witness"] is None
        assert rec["samples"] == 10


def test_verify_failure_has_witness(capsys):
    code, out, _ = run(capsys, "verify", "mult", "--model", "deriv-square")
    assert code == 2
    assert out.startswith("FAIL  mult[deriv-square]") and "x=t, y=t" in out


def test_verify_square_under_pi2_fails(capsys):
    code, out, _ = run(capsys, "verify", "pi2", "--model", "square", "--format", "json")
    assert code == 2
    (rec,) = records(out)
    assert rec["status"] == "fail" and rec["witness"]


def test_verify_unknown_target_and_model(capsys):
    assert run(capsys, "verify", "nonsense", "--model", "d")[0] == 1
    code, _, err = run(capsys, "verify", "mult", "--model", "nonsense")
    assert code == 1 and "nonsense" in err
    assert run(capsys, "verify", "mult")[0] == 1


def test_target_and_model_registries():
    assert set(TARGETS) == {"mult", "pi2", "twisted", "moment1", "spadesuit", "classical",
                            "order2", "parallelogram"}
    assert {"d", "dd", "square", "norm-sqrt2", "deriv-square"} <= set(MODELS)


# -- moments --------------------------------------------------------------------------------------

def test_moments_rank_two(capsys):
    code, out, _ = run(capsys, "moments", "--rank", 2, "--bound", 2, "--samples", 3)
    assert code == 0
    assert "B_1_1 = a_0_1*a_1_0 + a_1_1" in out.splitlines()
    assert "FAIL" not in out


def test_moments_bound_zero(capsys):
    code, out, _ = run(capsys, "moments", "--bound", 0)
    assert code == 0
    assert out.splitlines()[0] == "B_0 = 1"


def test_moments_from_script(capsys):
    code, out, _ = run(capsys, "moments", "--input", SCRIPTS / "moments.eq", "--samples", 2)
    assert code == 0 and "B_0_2 = a_0_1^2 + a_0_2" in out


def test_moments_with_bad_derivation_fails(capsys):
    code, out, _ = run(capsys, "moments", "--model", "sub-d", "--format", "json")
    assert code == 2
    last = records(out)[-1]
    assert last["status"] == "fail" and last["witness"]


# -- parse and errors -------------------------------------------------------------------------------

def test_parse_pretty_prints(capsys):
    code, out, _ = run(capsys, "parse", "--expr", "additive a;eq e:a(x+x)=0;")
    assert code == 0 and out == "additive a;\neq e: 2*a(x) = 0;\n"


def test_parse_error_exit_code(capsys):
    code, out, err = run(capsys, "parse", "--expr", "eq bad: q(x) = 1;")
    assert code == 1 and out == ""
    assert "1:9" in err and "'q'" in err


def test_usage_errors(capsys):
    assert run(capsys)[0] == 1
    assert run(capsys, "symmetrize")[0] == 1
    assert run(capsys, "symmetrize", "--input", ROOT / "missing.eq")[0] == 1
    assert run(capsys, "symmetrize", "--expr", "eq e: x = 0;", "--input", "x")[0] == 1
    assert run(capsys, "verify", "mult", "--model", "d", "--samples", 0)[0] == 1
    assert run(capsys, "specialize", "--expr", "eq e: x = 0; degree e 1;")[0] == 1


# -- determinism ---------------------------------------------------------------------------------------

def test_same_seed_same_bytes(capsys):
    argv = ["moments", "--rank", 2, "--bound", 1, "--model", "combo", "--seed", 11,
            "--samples", 5, "--format", "json"]
    first = run(capsys, *argv)
    assert first[0] == 0 and first[1]
    assert first == run(capsys, *argv)


def test_console_entry_point_is_byte_identical():
    cmd = [sys.executable, "-m", "polysym", "verify", "mult", "--model", "deriv-square",
           "--seed", "3", "--format", "json"]
    a = subprocess.run(cmd, capture_output=True, check=False)
    b = subprocess.run(cmd, capture_output=True, check=False)
    assert a.returncode == b.returncode == 2
    assert a.stdout == b.stdout and a.stdout
