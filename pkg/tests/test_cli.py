import json
import subprocess
import sys
from fractions import Fraction
from math import factorial
from pathlib import Path

import pytest

from eulerrec.cli import main, read_rows_csv

SPECS = Path(__file__).resolve().parents[1] / "specs"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_generate_table_line(capsys):
    code, out, _ = run(capsys, "generate", "--family", "A", "1", "1", "1", "--rows", "6",
                       "--format", "csv")
    assert code == 0 and "4,1,11" in out.splitlines()


def test_rows_zero_gives_initial_row(capsys):
    code, out, _ = run(capsys, "generate", "--spec", str(SPECS / "eulerian.spec"), "--rows", "0")
    assert code == 0 and out.splitlines() == ["n,k,value", "0,0,1"]


def test_a244312_row_sums(capsys):
    code, out, _ = run(capsys, "generate", "--spec", str(SPECS / "a244312.spec"), "--rows", "8")
    rows = read_rows_csv(out)
    assert code == 0 and sorted(rows) == list(range(1, 10))
    # each row sums to (n - 1)!
    assert all(sum(r) == factorial(n - 1) for n, r in rows.items())


def test_csv_round_trip_is_exact(capsys, tmp_path):
    out_file = tmp_path / "rows.csv"
    code, _, _ = run(capsys, "generate", "--family", "POLYA", "1", "2", "2", "1", "3", "1",
                     "--rows", "30", "--out", str(out_file))
    rows = read_rows_csv(out_file.read_text())
    assert code == 0 and max(len(str(int(x))) for r in rows.values() for x in r) > 20
    assert "e+" not in out_file.read_text()
    code, out, _ = run(capsys, "generate", "--family", "POLYA", "1", "2", "2", "1", "3", "1",
                       "--rows", "30", "--format", "json")
    data = json.loads(out)
    assert [[Fraction(c) for c in r["coeffs"]] for r in data["rows"]] == list(rows.values())


def test_classify_normal_with_cross_check(capsys):
    code, out, _ = run(capsys, "classify", "--family", "A", "1", "2", "1")
    rep = json.loads(out)
    assert code == 0 and rep["law"]["kind"] == "Normal"
    assert rep["law"]["params"]["mu"]["exact"] == "1/2"
    assert rep["law"]["params"]["sigma2"]["exact"] == "1/12"
    assert rep["cross_check"]["quasi_powers_agree"] is True


def test_classify_rayleigh(capsys):
    code, out, _ = run(capsys, "classify", "--spec", str(SPECS / "a039598.spec"))
    law = json.loads(out)["law"]
    assert law["kind"] == "Rayleigh"
    assert law["params"]["sigma"]["decimal"] == pytest.approx(0.70710678)


def test_classify_constant_and_strict(capsys):
    code, out, _ = run(capsys, "classify", "--spec", str(SPECS / "constant.spec"))
    assert code == 0 and json.loads(out)["law"]["kind"] == "Degenerate"
    code, out, _ = run(capsys, "classify", "--spec", str(SPECS / "a156920.spec"), "--strict")
    assert code == 4 and json.loads(out)["law"]["kind"] == "Unknown"


def test_verify_pass(capsys):
    code, out, _ = run(capsys, "verify", "--family", "A", "0", "1", "1", "--ns", "100,200,400",
                       "--law", "auto")
    rep = json.loads(out)
    ks = [r["ks"] for r in rep["records"]]
    assert code == 0 and rep["passed"] and ks == sorted(ks, reverse=True)


def test_verify_failure_exit(capsys):
    code, _, _ = run(capsys, "verify", "--spec", str(SPECS / "a091441.spec"), "--ns", "20",
                     "--moment-tol", "1e-6")
    assert code == 5


def test_moments_factorial_column(capsys):
    code, out, _ = run(capsys, "moments", "--spec", str(SPECS / "a008290.spec"), "--rows", "20",
                       "--order", "4")
    lines = out.splitlines()
    col = lines[0].split(",").index("factorial2")
    assert code == 0
    assert [line.split(",")[col] for line in lines[3:]] == ["1"] * 19


def test_oeis_offline(capsys):
    code, out, _ = run(capsys, "oeis", "--spec", str(SPECS / "eulerian.spec"), "--id", "A008292",
                       "--offline")
    assert code == 0 and json.loads(out)["full_match"]


def test_oeis_mismatch_exit(capsys):
    code, out, _ = run(capsys, "oeis", "--spec", str(SPECS / "pascal.spec"), "--id", "A008292",
                       "--offline")
    assert code == 5 and json.loads(out)["mismatch"]["n"] == 2


@pytest.mark.parametrize("argv, code, kind", [
    (["generate", "--spec", "/no/such.spec"], 6, "io"),
    (["generate", "--family", "A", "9", "1", "1"], 2, "spec"),
    (["generate", "--family", "A", "x", "1", "1"], 2, "config"),
    (["oeis", "--builtin", "eulerian", "--id", "A99", "--offline"], 2, "config"),
    (["oeis", "--builtin", "eulerian", "--id", "A999999", "--offline",
      "--cache-dir", "/nonexistent-cache"], 6, "io"),
])
def test_error_exit_codes(capsys, argv, code, kind):
    got, _, err = run(capsys, *argv)
    payload = json.loads(err)
    assert got == code and payload["error"] == kind and payload["exit_code"] == code


def test_spec_error_exit(capsys, tmp_path):
    bad = tmp_path / "bad.spec"
    bad.write_text('initial = "1"\na = "n +"\n')
    code, _, err = run(capsys, "classify", "--spec", str(bad))
    assert code == 2 and "position" in json.loads(err)["message"]


def test_generation_error_exit(capsys, tmp_path):
    bad = tmp_path / "div.spec"
    bad.write_text('initial = "1"\nrequire_integer = true\na = "n + v"\ne = "2"\n')
    code, _, err = run(capsys, "generate", "--spec", str(bad), "--rows", "4")
    assert code == 3 and json.loads(err)["error"] == "generation"


def test_two_sources_rejected():
    with pytest.raises(SystemExit):
        main(["generate", "--builtin", "eulerian", "--family", "A", "1", "1", "1"])


def test_console_script_entry():
    proc = subprocess.run([sys.executable, "-m", "eulerrec.cli", "classify", "--builtin",
                           "pascal"], capture_output=True, text=True, check=True)
    assert json.loads(proc.stdout)["law"]["kind"] == "Normal"
