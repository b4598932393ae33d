import json

import pytest

from run import build_parser, run, validate_dataset


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    for key in ("QCURVE_DATASET", "QCURVE_FORMAT", "QCURVE_STRICT", "QCURVE_LOG_LEVEL",
                "QCURVE_POINT_LIMIT", "QCURVE_TRIAL_LIMIT", "QCURVE_SEARCH_HEIGHT"):
        monkeypatch.delenv(key, raising=False)


def run_json(capsys, *argv):
    code = run([*argv, "--format", "json"])
    return code, json.loads(capsys.readouterr().out)


def statuses(document, claim):
    return [e["status"] for e in document["entries"] if e["claim"] == claim]


def test_parser_knows_every_command():
    parser = build_parser()
    args = parser.parse_args(["theorem", "--d", "3", "--dataset", "forms.json"])
    assert (args.command, args.d, args.dataset) == ("theorem", 3, "forms.json")


def test_unknown_subcommand():
    assert run(["prove-everything"]) == 2


def test_no_subcommand():
    assert run([]) == 2


def test_lemmas(capsys):
    code, document = run_json(capsys, "lemmas", "--lmax", "50", "--height", "5")
    assert code == 0
    assert statuses(document, "descent.residue_lemmas") == ["pass"]
    assert document["summary"]["fail"] == 0


def test_frey_reports_trace_at_P3(capsys):
    _, document = run_json(capsys, "frey", "--a", "1", "--b", "2", "--d", "3")
    entry = next(e for e in document["entries"] if e["claim"] == "frey.trace_p3")
    assert entry["status"] == "pass"
    assert entry["details"]["a_P3"] == -18


def test_frey_rejects_non_coprime_pair(capsys):
    assert run(["frey", "--a", "2", "--b", "4", "--d", "2"]) == 2
    assert "error" in capsys.readouterr().err


def test_weil_discrepancies_and_strict(capsys):
    code, document = run_json(capsys, "weil")
    assert code == 0
    assert statuses(document, "weil.table_row").count("discrepancy") == 7
    assert statuses(document, "weil.milne") == ["pass"] * 8
    assert run(["weil", "--strict"]) == 1


def test_quer(capsys):
    code, document = run_json(capsys, "quer")
    assert code == 0
    assert document["summary"]["pass"] == 6


def test_theorem_d2(capsys, dataset_path):
    code, document = run_json(capsys, "theorem", "--d", "2", "--dataset", str(dataset_path))
    assert code == 0
    details = document["entries"][0]["details"]
    assert details["conditions"] == ["p > 13", "p ≡ 1 mod 4", "p ≡ ±1 mod 5"]
    assert document["entries"][1]["details"]["density"] == 0.25


def test_theorem_d3_flags_the_bound(capsys, dataset_path):
    code, document = run_json(capsys, "theorem", "--d", "3", "--dataset", str(dataset_path))
    assert code == 0
    assert statuses(document, "theorem.bound") == ["discrepancy"]
    assert run(["theorem", "--d", "3", "--dataset", str(dataset_path), "--strict"]) == 1


def test_dataset_from_environment(capsys, monkeypatch, dataset_path):
    monkeypatch.setenv("QCURVE_DATASET", str(dataset_path))
    code, document = run_json(capsys, "newforms-validate")
    assert code == 0
    assert statuses(document, "newforms.census") == ["pass"]


def test_validate_dataset(dataset_path):
    report = validate_dataset(dataset_path)
    assert report.summary["fail"] == 0
    census = next(e for e in report.entries if e.claim == "newforms.census")
    assert census.details["census"]["800"]["S2"] == 4


def test_validate_dataset_missing_level_800(tmp_path, newform_document, capsys):
    from conftest import write_document

    newform_document["forms"] = [f for f in newform_document["forms"] if f["level"] != 800]
    path = write_document(tmp_path / "no800.json", newform_document)
    census = next(e for e in validate_dataset(path).entries if e.claim == "newforms.census")
    assert census.status == "fail"
    assert any("level 800" in m for m in census.details["mismatches"])
    assert run(["newforms-validate", "--dataset", path]) == 1


def test_newforms_validate_with_float_coefficient(tmp_path, newform_document):
    from conftest import write_document

    newform_document["forms"][2]["an"][6] = [1.5, 0]
    path = write_document(tmp_path / "float.json", newform_document)
    assert run(["newforms-validate", "--dataset", path]) == 2


def test_newforms_validate_without_dataset(capsys):
    assert run(["newforms-validate"]) == 2
    assert "--dataset" in capsys.readouterr().err


def test_theorem_on_incomplete_dataset(tmp_path, newform_document, capsys):
    from conftest import write_document

    newform_document["forms"] = [f for f in newform_document["forms"] if f["level"] != 800]
    path = write_document(tmp_path / "partial.json", newform_document)
    assert run(["theorem", "--d", "2", "--dataset", path]) == 1


def test_search(capsys):
    code, document = run_json(capsys, "search", "--d", "2", "--p", "17", "--height", "10")
    assert code == 0
    assert document["entries"][0]["details"]["hits"] == [[-1, -1, -1], [1, 1, 1]]


def test_eligible_rejects_small_x():
    assert run(["eligible", "--d", "2", "--x", "50"]) == 2


def test_output_file(tmp_path, capsys):
    target = tmp_path / "reports" / "weil.json"
    run(["weil", "--format", "json", "--output", str(target)])
    assert json.loads(target.read_text(encoding="utf-8"))["command"] == "weil"
    assert target.read_text(encoding="utf-8") == capsys.readouterr().out


def test_bad_log_level():
    assert run(["weil", "--log-level", "chatty"]) == 2
