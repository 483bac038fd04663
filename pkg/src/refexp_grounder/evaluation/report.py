"""Report files: a summary record followed by one record per sample outcome.

Both formats carry a `record_type` column (`summary` or `outcome`). In CSV,
text columns are written as-is (quoted when needed) and every other value is
JSON-encoded, so floats and nested mappings read back unchanged.
"""

# Copyright (c) 2025 Linus Held. All rights reserved.

import csv
import json
import logging
from pathlib import Path
from typing import Optional, Union

from ..errors import ReportIOError
from .judge import SampleOutcome
from .metrics import MetricsReport

logger = logging.getLogger(__name__)

REPORT_FORMATS = ("jsonl", "csv")

SUMMARY_COLUMNS = ["split", "mode", "n_samples", "accuracy", "generation_recall", "rejection_rate", "mean_reasoning_steps", "zero_step_fraction", "mean_stage_timings", "rejection_counts"]
OUTCOME_COLUMNS = [
    "sample_id",
    "split",
    "query",
    "gt_box",
    "predicted_box",
    "rejected",
    "rejection_reason",
    "iou_with_gt",
    "hit_at_05",
    "generation_recall_hit",
    "n_candidates",
    "n_reasoning_steps",
    "parse_quality",
    "gt_area_fraction",
    "trace_text",
    "stage_timings",
]
CSV_COLUMNS = ["record_type", *dict.fromkeys(SUMMARY_COLUMNS + OUTCOME_COLUMNS)]

_TEXT_COLUMNS = {"record_type", "split", "mode", "sample_id", "query", "parse_quality", "trace_text"}
_OPTIONAL_TEXT_COLUMNS = {"rejection_reason"}


def report_format_for(path: Union[str, Path]) -> str:
    """Picks the report format from the file extension.

    Raises:
        ReportIOError: If the extension is neither `.jsonl` nor `.csv`.
    """
    extension = Path(path).suffix.lower().lstrip(".")
    if extension not in REPORT_FORMATS:
        raise ReportIOError(f"Unsupported report format: '.{extension}'. Please provide a .jsonl or .csv file.")
    return extension


def _records(report: MetricsReport, outcomes: list[SampleOutcome]) -> list[dict]:
    return [{"record_type": "summary", **report.to_dict()}] + [{"record_type": "outcome", **o.to_dict()} for o in outcomes]


def _encode_cell(column: str, value) -> str:
    if column in _TEXT_COLUMNS:
        return value
    if column in _OPTIONAL_TEXT_COLUMNS:
        return "" if value is None else value
    return json.dumps(value)


def _decode_cell(column: str, text: str):
    if column in _TEXT_COLUMNS:
        return text
    if column in _OPTIONAL_TEXT_COLUMNS:
        return text or None
    return json.loads(text)


def write_report(report: MetricsReport, outcomes: list[SampleOutcome], path: Union[str, Path], fmt: Optional[str] = None):
    """Writes the summary and all outcomes, including full trace texts.

    Args:
        report (MetricsReport): The summary record.
        outcomes (list[SampleOutcome]): Outcomes in the order they should appear.
        path (Union[str, Path]): Destination file.
        fmt (Optional[str]): `jsonl` or `csv`; chosen from the extension when omitted.

    Raises:
        ReportIOError: If the format is unsupported or the file cannot be written.
    """
    fmt = fmt or report_format_for(path)
    if fmt not in REPORT_FORMATS:
        raise ReportIOError(f"Unsupported report format: '{fmt}'.")
    records = _records(report, outcomes)
    try:
        with open(path, "w", encoding="utf-8", newline="") as f:
            if fmt == "jsonl":
                for record in records:
                    f.write(json.dumps(record) + "\n")
            else:
                writer = csv.DictWriter(f, fieldnames=CSV_COLUMNS, restval="")
                writer.writeheader()
                for record in records:
                    writer.writerow({column: _encode_cell(column, value) for column, value in record.items()})
    except OSError as exc:
        raise ReportIOError(f"Cannot write report '{path}': {exc}") from exc
    logger.info("Wrote %s report with %d outcomes to %s", fmt, len(outcomes), path)


def _split_records(records: list[dict], path) -> tuple[MetricsReport, list[SampleOutcome]]:
    summaries = [r for r in records if r.get("record_type") == "summary"]
    if len(summaries) != 1 or records[0].get("record_type") != "summary":
        raise ReportIOError(f"Report '{path}' must start with exactly one summary record.")
    summary = {k: v for k, v in summaries[0].items() if k in SUMMARY_COLUMNS}
    outcomes = [SampleOutcome.from_dict({k: v for k, v in r.items() if k in OUTCOME_COLUMNS}) for r in records[1:]]
    return MetricsReport.from_dict(summary), outcomes


def load_report(path: Union[str, Path], fmt: Optional[str] = None) -> tuple[MetricsReport, list[SampleOutcome]]:
    """Reads a report written by `write_report`.

    Raises:
        ReportIOError: If the file cannot be read or is not a valid report.
    """
    fmt = fmt or report_format_for(path)
    try:
        with open(path, "r", encoding="utf-8", newline="") as f:
            if fmt == "jsonl":
                records = [json.loads(line) for line in f if line.strip()]
            else:
                records = []
                for row in csv.DictReader(f):
                    kind = row["record_type"]
                    columns = SUMMARY_COLUMNS if kind == "summary" else OUTCOME_COLUMNS
                    records.append({"record_type": kind, **{c: _decode_cell(c, row[c]) for c in columns}})
        if not records:
            raise ReportIOError(f"Report '{path}' is empty.")
        return _split_records(records, path)
    except OSError as exc:
        raise ReportIOError(f"Cannot read report '{path}': {exc}") from exc
    except (ValueError, KeyError, TypeError) as exc:
        raise ReportIOError(f"Invalid report '{path}': {exc}") from exc
