"""Candidate-generation recall under different candidate selection conditions."""

# Copyright (c) 2025 Linus Held. All rights reserved.

import csv
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, TextIO

from ..config import RunConfig
from ..core import collect_detections, extract_concepts, generate_global_caption
from ..errors import EmptyConceptSetError, GroundingError, SampleError
from ..gateway import BackendProvider, Detection, ImagePayload
from ..geometry import ImageDims, PixelBox, filter_by_area, iou, nms
from ..prompts import PromptRenderer
from .dataset import DatasetRecord

logger = logging.getLogger(__name__)

SWEEP_KINDS = ("confidence_threshold", "max_boxes")
CONDITIONS = ("pre_nms", "post_nms", "major")


@dataclass(frozen=True)
class RecallRow:
    """One point of the recall curve.

    Attributes:
        sweep_kind (str): `confidence_threshold` or `max_boxes`.
        sweep_value (float): The swept setting.
        condition (str): `pre_nms` (raw detector union), `post_nms` (after
            area-priority NMS) or `major` (area filter, then NMS).
        mean_boxes (float): Mean number of boxes per image.
        recall (float): Share of samples whose ground truth is matched.
        n_samples (int): Number of samples.
    """

    sweep_kind: str
    sweep_value: float
    condition: str
    mean_boxes: float
    recall: float
    n_samples: int

    def to_dict(self) -> dict:
        return {
            "sweep_kind": self.sweep_kind,
            "sweep_value": self.sweep_value,
            "condition": self.condition,
            "mean_boxes": self.mean_boxes,
            "recall": self.recall,
            "n_samples": self.n_samples,
        }


def condition_boxes(detections: list[Detection], dims: ImageDims, min_area_fraction: float, nms_iou: float) -> dict[str, list[PixelBox]]:
    """Boxes kept under each condition for one image."""
    raw = [d.box for d in detections]
    return {
        "pre_nms": raw,
        "post_nms": nms(raw, nms_iou),
        "major": nms(filter_by_area(raw, dims, min_area_fraction), nms_iou),
    }


def _recalled(boxes: list[PixelBox], gt_box: PixelBox, recall_iou: float) -> bool:
    return any(iou(box, gt_box) >= recall_iou for box in boxes)


def _sample_detections(
    record: DatasetRecord, config: RunConfig, provider: BackendProvider, renderer: PromptRenderer, sweep_kind: str, values: list[float]
) -> tuple[ImagePayload, list[list[Detection]]]:
    """Detections of one sample for every sweep value."""
    try:
        image = ImagePayload.from_path(record.image_path)
        backends = provider.for_image(record.image_path)
        caption = generate_global_caption(image, backends.mllm, renderer)
        try:
            concepts = extract_concepts(record.query, caption, backends.llm, renderer, config.concepts.noun_examples, config.concepts.use_caption)
        except EmptyConceptSetError:
            logger.info("Sample %s yields no concept; counted as not recalled", record.sample_id)
            return image, [[] for _ in values]

        if sweep_kind == "confidence_threshold":
            return image, [collect_detections(image, concepts, backends.detector, value, 1) for value in values]
        detected = collect_detections(image, concepts, backends.detector, config.detector.confidence_threshold, 1)
        ranked = sorted(detected, key=lambda d: -d.box.area)
        return image, [ranked[: int(value)] for value in values]
    except (GroundingError, OSError) as exc:
        raise SampleError(record.sample_id, exc) from exc


def recall_curve(
    records: list[DatasetRecord],
    config: RunConfig,
    sweep_kind: str,
    values: list[float],
    provider: Optional[BackendProvider] = None,
    renderer: Optional[PromptRenderer] = None,
) -> list[RecallRow]:
    """Measures candidate-generation recall for each sweep value and condition.

    Caption and concepts are computed once per sample. A `confidence_threshold`
    sweep re-runs the detector with each threshold; a `max_boxes` sweep keeps
    the largest detections, by area, up to each cap before the conditions apply.

    Args:
        records (list[DatasetRecord]): The samples.
        config (RunConfig): Run configuration (refinement thresholds, detector).
        sweep_kind (str): `confidence_threshold` or `max_boxes`.
        values (list[float]): Sweep points.
        provider (Optional[BackendProvider]): Backend provider.
        renderer (Optional[PromptRenderer]): Prompt renderer; built from
            `config.prompts.template_dir` when omitted.

    Returns:
        list[RecallRow]: Rows in sweep order, then condition.

    Raises:
        ValueError: If the sweep kind is unknown, values are empty, or there are no records.
        SampleError: If detection fails for a sample.
    """
    if sweep_kind not in SWEEP_KINDS:
        raise ValueError(f"Unknown sweep kind '{sweep_kind}'. Expected one of {', '.join(SWEEP_KINDS)}.")
    if not values:
        raise ValueError("A recall sweep needs at least one value.")
    if not records:
        raise ValueError("A recall sweep needs at least one record.")
    if sweep_kind == "max_boxes" and any(value < 1 for value in values):
        raise ValueError("max_boxes sweep values must be at least 1.")

    provider = provider or BackendProvider(config)
    renderer = renderer or PromptRenderer.for_template_dir(config.prompts.template_dir)
    with ThreadPoolExecutor(max_workers=config.max_workers) as executor:
        per_sample = list(executor.map(lambda record: _sample_detections(record, config, provider, renderer, sweep_kind, values), records))

    refinement = config.refinement
    recall_iou = config.evaluation.recall_iou
    rows = []
    for position, value in enumerate(values):
        kept = [condition_boxes(detections[position], image.dims, refinement.min_area_fraction, refinement.nms_iou) for image, detections in per_sample]
        for condition in CONDITIONS:
            hits = sum(_recalled(boxes[condition], record.gt_box, recall_iou) for boxes, record in zip(kept, records))
            total_boxes = sum(len(boxes[condition]) for boxes in kept)
            rows.append(RecallRow(sweep_kind, value, condition, total_boxes / len(records), hits / len(records), len(records)))
    return rows


def write_recall_table(rows: list[RecallRow], stream: TextIO):
    """Writes recall rows as CSV with a header line."""
    writer = csv.DictWriter(stream, fieldnames=list(RecallRow.__dataclass_fields__), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row.to_dict())
