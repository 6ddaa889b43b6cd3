import json
import subprocess
import sys

import pytest

from primforms.cli import main
from primforms.formula.verify import DATASET_ENV, default_dataset_path


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(out):
    return [line.split("\t") for line in out.splitlines() if line and not line.startswith("#")][1:]


def test_dims(capsys):
    code, out, _ = run(capsys, "dims", "--level", "8", "--max-weight", "18")
    assert code == 0 and "# precision" in out
    assert ["8", "18", "1", "4", "4"] in rows(out)
    code, out, _ = run(capsys, "dims", "--level", "1", "--max-weight", "10")
    assert all(r[3] == r[4] == "0" for r in rows(out))
    code, out, _ = run(capsys, "dims", "--level", "6", "--max-weight", "24")
    assert ["6", "24", "1", "2", "2"] in rows(out)


def test_newforms(capsys):
    code, out, _ = run(capsys, "newforms", "--level", "1", "--weight", "24")
    assert code == 0
    assert out.count("field Q(sqrt(144169))") == 2
    assert "a_2 = 540 + 12*sqrt(144169)" in out and "a_2 = 540 - 12*sqrt(144169)" in out
    assert "precision 12" in out
    code, out, _ = run(capsys, "newforms", "--level", "1", "--weight", "12")
    assert "a_2 = -24" in out and "a_10 = -115920" in out


def test_charpoly(capsys):
    code, out, _ = run(capsys, "charpoly", "--level", "8", "--weight", "18", "--prime", "3")
    assert code == 0
    assert "(X^2 + 952*X - 140413680) * (X^2 - 11592*X - 117696240)" in out
    code, out, _ = run(capsys, "charpoly", "--level", "9", "--weight", "20", "--prime", "2")
    assert "X^4 - 1446840*X^2 + 108573696000\n" in out
    code, out, _ = run(capsys, "charpoly", "--level", "1", "--weight", "12", "--prime", "2")
    assert "X + 24\n" in out


def test_usage_errors(capsys):
    code, _, err = run(capsys, "charpoly", "--level", "8", "--weight", "18", "--prime", "2")
    assert code == 2 and "domain error" in err
    assert run(capsys, "dims", "--level", "5", "--max-weight", "12")[0] == 2
    assert run(capsys, "newforms", "--level", "1", "--weight", "13")[0] == 2
    assert run(capsys, "newforms", "--level", "6", "--weight", "12", "--class", "5")[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_export(capsys):
    code, out, _ = run(capsys, "export", "--level", "1", "--weight", "10")
    assert code == 0 and json.loads(out) == []
    code, out, _ = run(capsys, "export", "--level", "1", "--weight", "12", "--prec", "13")
    rec, = json.loads(out)
    assert rec["coefficients"][:4] == ["1", "-24", "252", "-1472"]
    assert len(rec["coefficients"]) >= 11
    assert set(rec) == {"level", "weight", "class", "field_degree", "radicand", "coefficients",
                        "charpoly_per_prime"}
    code, out, _ = run(capsys, "export", "--level", "8", "--weight", "18")
    recs = json.loads(out)
    assert len(recs) == 4 and {r["radicand"] for r in recs} == {114, 2146}
    code, out, _ = run(capsys, "export", "--level", "8", "--weight", "18", "--format", "csv")
    assert len(out.splitlines()) == 5


def test_verify_entry_and_report(capsys, tmp_path):
    report = tmp_path / "r.jsonl"
    code, out, _ = run(capsys, "verify", "--entry", "L1-P24", "--report", str(report))
    assert code == 0
    assert "PASS\tL1-P24" in out
    assert "entries: 1, pass: 1, fail-annotated: 0, unsupported: 0" in out
    rec = json.loads(report.read_text())
    assert rec["id"] == "L1-P24" and rec["status"] == "pass" and rec["precision"] == 12


def test_verify_corrupted_dataset(capsys, tmp_path, monkeypatch):
    text = open(default_dataset_path(), encoding="utf-8").read()
    bad = tmp_path / "bad.txt"
    bad.write_text(text.replace("C^4+1032*C^2*d", "C^4+1033*C^2*d"))
    monkeypatch.setenv(DATASET_ENV, str(bad))
    code, out, _ = run(capsys, "verify", "--entry", "L6-P24-3", "--report", str(tmp_path / "r.jsonl"))
    assert code == 1 and "FAIL\tL6-P24-3" in out
    broken = tmp_path / "broken.txt"
    broken.write_text(text + "\nL1-X | 1 | twelve | 1 | Delta1 | 1 | L1\n")
    code, out, _ = run(capsys, "verify", "--dataset", str(broken), "--report", str(tmp_path / "r.jsonl"))
    assert code != 0 and "line" in out


def test_deterministic_output(capsys):
    first = run(capsys, "newforms", "--level", "6", "--weight", "16")
    second = run(capsys, "newforms", "--level", "6", "--weight", "16")
    assert first == second


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "primforms", "charpoly", "--level", "1", "--weight", "12",
                          "--prime", "3"], capture_output=True, text=True, cwd=tmp_path)
    assert res.returncode == 0 and "X - 252" in res.stdout
