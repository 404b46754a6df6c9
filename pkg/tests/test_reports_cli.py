import csv
import io
import json
import subprocess
import sys
from fractions import Fraction

import jsonschema
import mpmath
import pytest

from shiftconv.cli import main, parse_exponent, parse_int_set, parse_ladder, rerun, InvalidParameters
from shiftconv.reports import CSV_FIELDS, decode_number, encode_number, schema

FAST = ["--ladder", "300,3000,30000"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_encode_decode_roundtrip():
    for x in (3, Fraction(-7, 12)):
        enc = encode_number(x, 30)
        assert enc["rational"] == str(Fraction(x)) and decode_number(enc) == x
    with mpmath.workdps(40):
        pi = +mpmath.pi
    enc = encode_number(pi, 35)
    with mpmath.workdps(40):
        assert abs(decode_number(enc) - pi) < mpmath.mpf(10) ** -33
    assert encode_number(0.1, 30) == {"decimal": "0.1", "digits": 17}
    z = decode_number(encode_number(mpmath.mpc(1, -2), 20))
    assert z == mpmath.mpc(1, -2)
    assert encode_number(complex(2, 0), 10)["decimal"] == "2.0"
    with pytest.raises(TypeError):
        encode_number(True, 10)
    with pytest.raises(TypeError):
        encode_number("1", 10)


def test_parsers():
    assert parse_int_set("1..4") == [1, 2, 3, 4]
    assert parse_int_set("-3,-1") == [-3, -1]
    assert parse_int_set("-3..-2, 5") == [-3, -2, 5]
    with pytest.raises(InvalidParameters):
        parse_int_set("5..1")
    with pytest.raises(InvalidParameters):
        parse_int_set(" , ")
    assert parse_ladder("1e3,1e4") == (1000, 10000)
    with pytest.raises(InvalidParameters):
        parse_ladder("1.5e0")
    assert parse_exponent("-3") == -3
    assert parse_exponent("-2.5") == mpmath.mpf("-2.5")
    assert parse_exponent("-3+0.5j") == mpmath.mpc(-3, 0.5)


def test_eval_rhs_json_validates(capsys):
    code, out, err = run(capsys, "eval-rhs", "--n", "2", "--r1", "-3", "--r2", "-2", "--P", "-6", "--d-cutoff", "60")
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, schema())
    [rep] = doc["reports"]
    assert rep["kind"] == "eval-rhs" and rep["verdict"] == "computed"
    assert "term1_finite" in rep["terms"]
    assert doc["manifest"]["command"] == "eval-rhs"
    assert "eval-rhs" in err


def test_eval_sum_json_and_csv_agree(capsys, tmp_path):
    args = ["eval-sum", "--n", "1", "--r1", "-4", "--r2", "-2", "--P", "-6", "--d-cutoff", "60", *FAST]
    code, out, _ = run(capsys, *args, "--json")
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, schema())
    [rep] = doc["reports"]
    assert rep["verdict"] == "pass"
    target = tmp_path / "run.csv"
    code, _, _ = run(capsys, *args, "--csv", "--out", str(target))
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(target.read_text())))
    assert list(rows[0]) == CSV_FIELDS
    assert rows[0]["verdict"] == rep["verdict"]
    assert rows[0]["rhs"] == rep["rhs"]["decimal"]
    manifest = json.loads((tmp_path / "run.csv.manifest.json").read_text())
    assert manifest["parameters"]["n"] == 1


def test_check_conjecture_and_scan(capsys):
    code, out, _ = run(capsys, "check-conjecture", "--id", "eq1.9", "--n", "1..2", *FAST)
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, schema())
    assert [r["verdict"] for r in doc["reports"]] == ["pass", "pass"]
    code, out, err = run(capsys, "scan-family", "--degree", "1", "--samples", "1", "--n", "1", *FAST)
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, schema())
    assert doc["reports"][0]["kind"] == "family"
    assert doc["manifest"]["seed"] == 0


def test_self_test(capsys):
    code, out, _ = run(capsys, "self-test", "--samples", "3")
    assert code == 0
    jsonschema.validate(json.loads(out), schema())


@pytest.mark.parametrize(
    "argv",
    [
        ["eval-sum", "--n", "0", "--r1", "-3", "--r2", "-2", "--P", "-6"],
        ["eval-rhs", "--n", "1", "--r1", "-3", "--r2", "-2", "--P", "-1"],
        ["eval-rhs", "--n", "1", "--r1", "-3", "--r2", "-2"],
        ["check-conjecture", "--id", "nope"],
        ["check-conjecture", "--id", "eq1.9", "--n", "0"],
        ["scan-family", "--degree", "1", "--precision", "2"],
        ["eval-rhs", "--n", "1", "--r1", "-3", "--r2", "-2", "--P", "-6", "--ladder", "10,5"],
    ],
)
def test_invalid_parameters_exit_2(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 2


def test_divergent_sum_exit_3(capsys):
    code, _, err = run(capsys, "eval-sum", "--n", "1", "--r1", "0", "--r2", "0", "--P", "0", *FAST)
    assert code == 3


def test_manifest_rerun_reproduces(capsys, tmp_path):
    first = tmp_path / "a.json"
    argv = ["check-conjecture", "--id", "chester", "--n", "1", *FAST, "--out", str(first)]
    assert main(argv) == 0
    doc = json.loads(first.read_text())
    second = tmp_path / "b.json"
    assert rerun(doc["manifest"], str(second)) == 0
    again = json.loads(second.read_text())
    for d in (doc, again):
        d["manifest"].pop("timestamp")
        d["manifest"]["argv"] = [a for a in d["manifest"]["argv"] if not a.endswith(".json")]
    assert doc == again


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "shiftconv", "eval-rhs", "--n", "3", "--r1", "-3", "--r2", "-2", "--P", "-4", "--d-cutoff", "20", "--csv"],
        capture_output=True,
        text=True,
        timeout=120,
    )
    assert res.returncode == 0
    assert res.stdout.splitlines()[0].split(",") == CSV_FIELDS
