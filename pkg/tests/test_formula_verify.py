import dataclasses

import pytest

from primforms.formula import binding_set, evaluate_formal, parse
from primforms.formula.verify import (DATASET_ENV, DatasetError, default_dataset_path, group_completeness,
                                      load_dataset, parse_dataset, summary_line, verify_dataset, verify_entry)
from primforms.qseries import series_mul
from primforms.specialseries import delta_series

ENTRIES = {e.id: e for e in load_dataset()}


def test_dataset_shape():
    assert len(ENTRIES) >= 200
    for e in ENTRIES.values():
        assert e.multiplier == f"Delta{e.level}"
        assert e.weight % 2 == 0


def test_record_errors_carry_line_numbers():
    with pytest.raises(DatasetError) as exc:
        parse_dataset("# comment\n\nX | 1 | 12 | 1 | Delta1\n")
    assert exc.value.line == 3
    good = "A | 1 | 12 | 1 | Delta1 | 1 | L1"
    with pytest.raises(DatasetError, match="duplicate"):
        parse_dataset(good + "\n" + good)
    with pytest.raises(DatasetError, match="class"):
        parse_dataset("A | 9 | 12 | 2 | Delta9 | 1 | L9")
    with pytest.raises(DatasetError, match="multiplier"):
        parse_dataset("A | 1 | 12 | 1 | Delta2 | 1 | L1")


def test_pass_entries():
    for ident in ("T-L1", "L1-P24", "L6-P24-3", "L9-P20-s"):
        r = verify_entry(ENTRIES[ident])
        assert r.status == "pass", (ident, r.detail)


def test_mutation_reports_first_mismatch():
    e = ENTRIES["L6-P24-3"]
    bad = dataclasses.replace(e, expression=e.expression.replace("1032", "1033"))
    r = verify_entry(bad)
    assert r.status == "fail"
    # independent location of the first wrong coefficient: Delta6 times the changed term
    P = r.precision
    diff, _ = evaluate_formal(parse("C^2*G2*Gm2*I*C^2*d"), binding_set(6), P)
    d = series_mul(diff[frozenset()], delta_series(6, P))
    first = next(n for n, c in enumerate(d.coeffs) if c != 0)
    assert r.mismatch["index"] == first
    assert r.mismatch["expected"] != r.mismatch["got"]


def test_annotated_misprints():
    r = verify_entry(ENTRIES["L2-P50-2"])
    assert r.status == "fail-annotated"
    assert r.literal["status"] == "fail" and "parse error" in r.literal["detail"]
    r = verify_entry(ENTRIES["L4-P8"])
    assert r.status == "fail-annotated"


def test_wrong_weight_fails():
    e = dataclasses.replace(ENTRIES["L1-P16"], expression="E6")
    r = verify_entry(e)
    assert r.status == "fail" and "weight" in r.detail


def test_completeness_and_summary():
    subset = [ENTRIES["L8-P8a"], ENTRIES["L1-P24"]]
    reports, problems = verify_dataset(subset)
    assert [r.status for r in reports] == ["pass", "pass"]
    assert problems == ["(8,8,1): entries cover 1 of 2 newforms"]
    full = [ENTRIES["L8-P8a"], ENTRIES["L8-P8b"]]
    assert group_completeness(full, [verify_entry(e) for e in full]) == []
    # two readings of the same pair cover it once
    alt = [ENTRIES["L6-P42-3a"], ENTRIES["L6-P42-3b"]]
    assert group_completeness(alt, [verify_entry(e) for e in alt]) == []
    assert summary_line(reports) == "entries: 2, pass: 2, fail-annotated: 0, unsupported: 0, fail: 0"


def test_dataset_env(monkeypatch, tmp_path):
    p = tmp_path / "d.txt"
    p.write_text("A | 1 | 12 | 1 | Delta1 | 1 | L1\n")
    monkeypatch.setenv(DATASET_ENV, str(p))
    assert default_dataset_path() == str(p)
    assert [e.id for e in load_dataset()] == ["A"]
