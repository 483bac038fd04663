"""Benchmark runner: grounds every dataset sample and judges the results."""

# Copyright (c) 2025 Linus Held. All rights reserved.

import json
import logging
import threading
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

from tqdm import tqdm

from ..config import RunConfig
from ..errors import GroundingError, ReportIOError, SampleError
from ..gateway import BackendProvider, ImagePayload
from ..grounding_system import ABLATION_MODES, GroundingSystem
from .dataset import DatasetRecord
from .judge import SampleOutcome, judge_sample
from .metrics import MetricsReport, aggregate

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BenchmarkRun:
    """Metrics plus the per-sample outcomes they were computed from, in dataset order."""

    report: MetricsReport
    outcomes: list[SampleOutcome]


class OutcomeCheckpoint:
    """Append-only file of finished outcomes used to resume interrupted runs."""

    def __init__(self, path: Union[str, Path]):
        self.path = Path(path)
        self._lock = threading.Lock()

    def load(self) -> dict[str, SampleOutcome]:
        """Returns the outcomes already stored, keyed by sample id.

        A torn last line (from an interrupted write) is ignored.
        """
        if not self.path.exists():
            return {}
        done = {}
        try:
            lines = self.path.read_text(encoding="utf-8").splitlines()
        except OSError as exc:
            raise ReportIOError(f"Cannot read checkpoint '{self.path}': {exc}") from exc
        for line_number, line in enumerate(lines, start=1):
            if not line.strip():
                continue
            try:
                outcome = SampleOutcome.from_dict(json.loads(line))
            except (ValueError, KeyError, TypeError):
                logger.warning("Ignoring unreadable checkpoint line %d in %s", line_number, self.path)
                continue
            done[outcome.sample_id] = outcome
        return done

    def reset(self):
        if self.path.exists():
            self.path.unlink()

    def rewrite(self, outcomes: list[SampleOutcome]):
        """Replaces the file with exactly these outcomes, dropping torn or foreign lines."""
        self.reset()
        for outcome in outcomes:
            self.append(outcome)

    def append(self, outcome: SampleOutcome):
        with self._lock:
            try:
                with open(self.path, "a", encoding="utf-8") as f:
                    f.write(json.dumps(outcome.to_dict()) + "\n")
            except OSError as exc:
                raise ReportIOError(f"Cannot write checkpoint '{self.path}': {exc}") from exc


def ground_record(system: GroundingSystem, provider: BackendProvider, record: DatasetRecord, recall_iou: float = 0.5) -> SampleOutcome:
    """Grounds and judges one sample.

    Raises:
        SampleError: If grounding fails; the error names the sample.
    """
    try:
        image = ImagePayload.from_path(record.image_path)
        backends = provider.for_image(record.image_path)
        reference = record.gt_box if system.mode != "caption" else None
        result = system.ground(image, record.query, backends, reference_box=reference)
    except (GroundingError, OSError) as exc:
        raise SampleError(record.sample_id, exc) from exc
    return judge_sample(result, record, recall_iou)


def run_benchmark(
    records: list[DatasetRecord],
    config: RunConfig,
    mode: str = "caption",
    provider: Optional[BackendProvider] = None,
    checkpoint_path: Optional[Union[str, Path]] = None,
    resume: bool = False,
    show_progress: bool = False,
) -> BenchmarkRun:
    """Runs the grounding system over a dataset.

    Samples are processed by `config.max_workers` threads. Finished outcomes are
    appended to the checkpoint file as they complete; with `resume` the samples
    already in it are not recomputed. The returned outcomes follow dataset order.

    Args:
        records (list[DatasetRecord]): Samples of a single split.
        config (RunConfig): Run configuration.
        mode (str): `caption`, `query_echo` or `query_plus`.
        provider (Optional[BackendProvider]): Backend provider; built from the
            configuration when omitted.
        checkpoint_path (Optional[Union[str, Path]]): Checkpoint file.
        resume (bool): Reuse outcomes from the checkpoint file.
        show_progress (bool): Display a progress bar.

    Returns:
        BenchmarkRun: Report and outcomes.

    Raises:
        SampleError: If a sample fails.
        EmptySplitError: If there are no records.
    """
    system = GroundingSystem(config, mode=mode)
    provider = provider or BackendProvider(config)
    checkpoint = OutcomeCheckpoint(checkpoint_path) if checkpoint_path else None

    done: dict[str, SampleOutcome] = {}
    if checkpoint is not None:
        if resume:
            wanted = {r.sample_id for r in records}
            done = {k: v for k, v in checkpoint.load().items() if k in wanted}
            checkpoint.rewrite([done[r.sample_id] for r in records if r.sample_id in done])
            logger.info("Resuming: %d of %d samples already done", len(done), len(records))
        else:
            checkpoint.reset()

    pending = [r for r in records if r.sample_id not in done]
    with ThreadPoolExecutor(max_workers=config.max_workers) as executor, tqdm(total=len(pending), desc=f"bench[{mode}]", disable=not show_progress) as progress:
        futures = {executor.submit(ground_record, system, provider, record, config.evaluation.recall_iou): record for record in pending}
        for future in as_completed(futures):
            outcome = future.result()
            done[outcome.sample_id] = outcome
            if checkpoint is not None:
                checkpoint.append(outcome)
            progress.update(1)

    outcomes = [done[r.sample_id] for r in records]
    report = aggregate(outcomes, mode=mode)
    logger.info("Benchmark %s: accuracy=%.4f recall=%.4f rejection=%.4f", mode, report.accuracy, report.generation_recall, report.rejection_rate)
    return BenchmarkRun(report, outcomes)


def run_ablation(records: list[DatasetRecord], mode: str, config: RunConfig, provider: Optional[BackendProvider] = None) -> MetricsReport:
    """Runs the benchmark in one description mode and returns its metrics.

    Raises:
        ValueError: If the mode is unknown.
    """
    if mode not in ABLATION_MODES:
        raise ValueError(f"Unknown ablation mode '{mode}'. Expected one of {', '.join(ABLATION_MODES)}.")
    return run_benchmark(records, config, mode=mode, provider=provider).report
