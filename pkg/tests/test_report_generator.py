import json

import pytest

from core.report_generator import (
    CLAIMS,
    DISCREPANCY,
    FAIL,
    PASS,
    CheckEntry,
    Report,
    UnknownClaimError,
    emit_report,
    write_report,
)


def test_empty_report_is_valid_json():
    document = json.loads(emit_report(Report("lemmas"), "json"))
    assert document["entries"] == []
    assert document["summary"] == {"pass": 0, "fail": 0, "discrepancy": 0, "inconclusive": 0}


def test_unknown_claim():
    with pytest.raises(UnknownClaimError):
        Report("lemmas").add("descent.unknown", True)


def test_unknown_status():
    with pytest.raises(ValueError):
        CheckEntry("descent.identities", "maybe")


def test_entries_carry_their_anchor():
    entry = Report("lemmas").add("descent.identities", True, {"checked": 9})
    assert entry.status == PASS
    assert entry.anchor == CLAIMS["descent.identities"]


def test_exit_codes():
    report = Report("weil")
    report.add("weil.milne", True)
    assert report.exit_code() == 0
    report.add("weil.table_row", False, otherwise=DISCREPANCY)
    assert report.exit_code() == 0
    assert report.exit_code(strict=True) == 1
    report.record("theorem.bound", FAIL)
    assert report.exit_code() == 1


def test_exact_values_become_strings():
    from fractions import Fraction

    report = Report("theorem")
    report.add("theorem.density", True, {"density": Fraction(1, 4), "primes": frozenset({5, 2})})
    entry = json.loads(emit_report(report, "json"))["entries"][0]
    assert entry["details"] == {"density": "1/4", "primes": [2, 5]}


def test_text_report():
    report = Report("lemmas")
    report.add("descent.residue_lemmas", True, {"primes": 15})
    text = emit_report(report, "text")
    assert "[PASS] descent.residue_lemmas" in text
    assert "primes: 15" in text
    assert text.endswith("summary: pass=1, fail=0, discrepancy=0, inconclusive=0\n")


def test_unsupported_format():
    with pytest.raises(ValueError):
        emit_report(Report("lemmas"), "xml")


def test_json_output_is_deterministic(tmp_path):
    report = Report("lemmas")
    report.add("descent.identities", True, {"b": 1, "a": 2})
    first = write_report(report, "json", tmp_path / "out" / "first.json").read_text(encoding="utf-8")
    second = write_report(report, "json", tmp_path / "second.json").read_text(encoding="utf-8")
    assert first == second
