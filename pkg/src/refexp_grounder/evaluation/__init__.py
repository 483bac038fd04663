"""Evaluation harness: datasets, judging, metrics, recall curves and reports."""

# Copyright (c) 2025 Linus Held. All rights reserved.

from .converter import convert_referring_annotations
from .dataset import DatasetRecord, load_dataset, write_dataset
from .judge import ACCURACY_IOU, SampleOutcome, judge_sample
from .metrics import DEFAULT_AREA_BETAS, AreaRecall, MetricsReport, RunSummary, aggregate, recall_by_gt_area, summarize_runs
from .recall import CONDITIONS, SWEEP_KINDS, RecallRow, condition_boxes, recall_curve, write_recall_table
from .report import REPORT_FORMATS, load_report, report_format_for, write_report
from .runner import BenchmarkRun, OutcomeCheckpoint, ground_record, run_ablation, run_benchmark

__all__ = [
    "ACCURACY_IOU",
    "CONDITIONS",
    "DEFAULT_AREA_BETAS",
    "REPORT_FORMATS",
    "SWEEP_KINDS",
    "AreaRecall",
    "BenchmarkRun",
    "DatasetRecord",
    "MetricsReport",
    "OutcomeCheckpoint",
    "RecallRow",
    "RunSummary",
    "SampleOutcome",
    "aggregate",
    "condition_boxes",
    "convert_referring_annotations",
    "ground_record",
    "judge_sample",
    "load_dataset",
    "load_report",
    "recall_by_gt_area",
    "recall_curve",
    "report_format_for",
    "run_ablation",
    "run_benchmark",
    "summarize_runs",
    "write_dataset",
    "write_recall_table",
    "write_report",
]
