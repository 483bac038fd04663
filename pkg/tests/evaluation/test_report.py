import json

import pytest

from refexp_grounder.errors import ReportIOError
from refexp_grounder.evaluation import aggregate, load_report, report_format_for, write_report


@pytest.fixture
def report_and_outcomes(make_outcome):
    outcomes = [
        make_outcome("a", trace='Reasoning Step 1: the "left" one, near the door.\nAnswer: 1', timings={"selection": 1 / 3}),
        make_outcome("b", rejected=True, trace="Answer: none"),
        make_outcome("c", hit=False, area=1 / 7),
    ]
    return aggregate(outcomes), outcomes


@pytest.mark.parametrize("suffix", [".jsonl", ".csv"])
def test_round_trip(tmp_path, report_and_outcomes, suffix):
    report, outcomes = report_and_outcomes
    path = tmp_path / f"report{suffix}"
    write_report(report, outcomes, path)

    loaded_report, loaded_outcomes = load_report(path)
    assert loaded_report == report
    assert loaded_outcomes == outcomes
    assert loaded_outcomes[0].stage_timings["selection"] == 1 / 3
    assert loaded_outcomes[0].trace_text.endswith("near the door.\nAnswer: 1")
    assert loaded_outcomes[1].predicted_box is None
    assert loaded_outcomes[1].rejection_reason == "selector"


def test_jsonl_starts_with_the_summary(tmp_path, report_and_outcomes):
    report, outcomes = report_and_outcomes
    path = tmp_path / "report.jsonl"
    write_report(report, outcomes, path)

    lines = [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines()]
    assert [line["record_type"] for line in lines] == ["summary", "outcome", "outcome", "outcome"]
    assert lines[0]["accuracy"] == report.accuracy
    assert [line["sample_id"] for line in lines[1:]] == ["a", "b", "c"]


def test_explicit_format_overrides_extension(tmp_path, report_and_outcomes):
    report, outcomes = report_and_outcomes
    path = tmp_path / "report.jsonl"
    write_report(report, outcomes, path, fmt="csv")
    assert path.read_text(encoding="utf-8").startswith("record_type,")
    assert load_report(path, fmt="csv")[1] == outcomes


@pytest.mark.parametrize("name", ["report.txt", "report", "report.json"])
def test_unsupported_extension(tmp_path, name):
    with pytest.raises(ReportIOError, match="Unsupported report format"):
        report_format_for(tmp_path / name)


def test_report_must_start_with_the_summary(tmp_path, report_and_outcomes):
    report, outcomes = report_and_outcomes
    path = tmp_path / "report.jsonl"
    path.write_text(json.dumps({"record_type": "outcome", **outcomes[0].to_dict()}) + "\n", encoding="utf-8")
    with pytest.raises(ReportIOError, match="exactly one summary record"):
        load_report(path)


def test_invalid_and_missing_reports(tmp_path):
    broken = tmp_path / "broken.jsonl"
    broken.write_text("{nope\n", encoding="utf-8")
    with pytest.raises(ReportIOError, match="Invalid report"):
        load_report(broken)
    with pytest.raises(ReportIOError, match="Cannot read report"):
        load_report(tmp_path / "absent.csv")
