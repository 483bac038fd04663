"""Aggregation of sample outcomes into benchmark metrics."""

# Copyright (c) 2025 Linus Held. All rights reserved.

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from ..errors import EmptySplitError, MetricsInvariantError
from .judge import SampleOutcome

DEFAULT_AREA_BETAS = (0.05, 0.20)


@dataclass(frozen=True)
class MetricsReport:
    """Benchmark metrics over one split.

    Attributes:
        split (str): The split the outcomes belong to.
        mode (str): Description mode (`caption`, `query_echo` or `query_plus`).
        n_samples (int): Number of judged samples.
        accuracy (float): Share of samples with IoU > 0.5.
        generation_recall (float): Share of samples whose ground truth is
            matched by some candidate.
        rejection_rate (float): Share of rejected samples.
        mean_reasoning_steps (float): Mean number of reasoning steps per trace.
        zero_step_fraction (float): Share of traces without any reasoning step.
        mean_stage_timings (dict[str, float]): Mean seconds per stage over the
            samples that reached it.
        rejection_counts (dict[str, int]): Rejections per reason.
    """

    split: str
    mode: str
    n_samples: int
    accuracy: float
    generation_recall: float
    rejection_rate: float
    mean_reasoning_steps: float
    zero_step_fraction: float
    mean_stage_timings: dict[str, float] = field(default_factory=dict)
    rejection_counts: dict[str, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "split": self.split,
            "mode": self.mode,
            "n_samples": self.n_samples,
            "accuracy": self.accuracy,
            "generation_recall": self.generation_recall,
            "rejection_rate": self.rejection_rate,
            "mean_reasoning_steps": self.mean_reasoning_steps,
            "zero_step_fraction": self.zero_step_fraction,
            "mean_stage_timings": dict(self.mean_stage_timings),
            "rejection_counts": dict(self.rejection_counts),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MetricsReport":
        values = dict(data)
        values["mean_stage_timings"] = dict(values.get("mean_stage_timings") or {})
        values["rejection_counts"] = dict(values.get("rejection_counts") or {})
        return cls(**values)


def _rate(flags: list[bool]) -> float:
    return sum(flags) / len(flags)


def aggregate(outcomes: Iterable[SampleOutcome], mode: str = "caption") -> MetricsReport:
    """Reduces outcomes of one split to a MetricsReport.

    The result does not depend on outcome order; sums use `math.fsum`.

    Args:
        outcomes (Iterable[SampleOutcome]): Outcomes of a single split.
        mode (str): Mode tag written into the report.

    Returns:
        MetricsReport: The metrics.

    Raises:
        EmptySplitError: If there are no outcomes.
        ValueError: If the outcomes span several splits.
        MetricsInvariantError: If accuracy exceeds generation recall.
    """
    outcomes = list(outcomes)
    if not outcomes:
        raise EmptySplitError("Cannot aggregate an empty set of outcomes.")
    splits = sorted({o.split for o in outcomes})
    if len(splits) > 1:
        raise ValueError(f"Outcomes span several splits: {', '.join(splits)}.")

    accuracy = _rate([o.hit_at_05 for o in outcomes])
    recall = _rate([o.generation_recall_hit for o in outcomes])
    if accuracy > recall:
        raise MetricsInvariantError(f"accuracy {accuracy:.4f} exceeds generation recall {recall:.4f} on split '{splits[0]}'.")

    timings: dict[str, list[float]] = {}
    for outcome in outcomes:
        for stage, seconds in outcome.stage_timings.items():
            timings.setdefault(stage, []).append(seconds)

    reasons = Counter(o.rejection_reason for o in outcomes if o.rejected)
    return MetricsReport(
        split=splits[0],
        mode=mode,
        n_samples=len(outcomes),
        accuracy=accuracy,
        generation_recall=recall,
        rejection_rate=_rate([o.rejected for o in outcomes]),
        mean_reasoning_steps=math.fsum(o.n_reasoning_steps for o in outcomes) / len(outcomes),
        zero_step_fraction=_rate([o.n_reasoning_steps == 0 for o in outcomes]),
        mean_stage_timings={stage: math.fsum(values) / len(values) for stage, values in sorted(timings.items())},
        rejection_counts={reason: reasons[reason] for reason in sorted(reasons)},
    )


@dataclass(frozen=True)
class AreaRecall:
    """Generation recall over samples whose ground truth is smaller than `beta` of the image."""

    beta: float
    n_samples: int
    recall: Optional[float]


def recall_by_gt_area(outcomes: Iterable[SampleOutcome], betas: Iterable[float] = DEFAULT_AREA_BETAS) -> list[AreaRecall]:
    """Generation recall restricted to small ground-truth boxes.

    Returns:
        list[AreaRecall]: One row per beta; `recall` is None when no sample
            falls below it.
    """
    outcomes = list(outcomes)
    rows = []
    for beta in betas:
        subset = [o.generation_recall_hit for o in outcomes if o.gt_area_fraction < beta]
        rows.append(AreaRecall(beta, len(subset), _rate(subset) if subset else None))
    return rows


@dataclass(frozen=True)
class RunSummary:
    """Spread of repeated benchmark runs (population standard deviation)."""

    n_runs: int
    mean_accuracy: float
    std_accuracy: float
    mean_generation_recall: float
    std_generation_recall: float
    mean_rejection_rate: float

    def to_dict(self) -> dict:
        return {
            "n_runs": self.n_runs,
            "mean_accuracy": self.mean_accuracy,
            "std_accuracy": self.std_accuracy,
            "mean_generation_recall": self.mean_generation_recall,
            "std_generation_recall": self.std_generation_recall,
            "mean_rejection_rate": self.mean_rejection_rate,
        }


def summarize_runs(reports: Iterable[MetricsReport]) -> RunSummary:
    """Mean and population standard deviation of accuracy and recall across runs.

    Raises:
        EmptySplitError: If no report is given.
    """
    reports = list(reports)
    if not reports:
        raise EmptySplitError("Cannot summarize zero runs.")
    accuracy = np.array([r.accuracy for r in reports], dtype=np.float64)
    recall = np.array([r.generation_recall for r in reports], dtype=np.float64)
    rejection = np.array([r.rejection_rate for r in reports], dtype=np.float64)
    return RunSummary(
        n_runs=len(reports),
        mean_accuracy=float(accuracy.mean()),
        std_accuracy=float(accuracy.std()),
        mean_generation_recall=float(recall.mean()),
        std_generation_recall=float(recall.std()),
        mean_rejection_rate=float(rejection.mean()),
    )
