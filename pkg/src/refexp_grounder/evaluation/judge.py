"""Scoring of one grounding result against its dataset record."""

# Copyright (c) 2025 Linus Held. All rights reserved.

from dataclasses import asdict, dataclass, field
from typing import Optional

from ..core import GroundingResult
from ..geometry import PixelBox, area_fraction, iou
from .dataset import DatasetRecord

ACCURACY_IOU = 0.5


@dataclass(frozen=True)
class SampleOutcome:
    """Per-sample verdict as written to reports.

    Attributes:
        sample_id (str): Dataset sample id.
        split (str): Dataset split.
        query (str): The referring expression.
        gt_box (PixelBox): Ground-truth box.
        predicted_box (Optional[PixelBox]): Predicted box; None when rejected.
        rejected (bool): True when the pipeline rejected the query.
        rejection_reason (Optional[str]): Why the query was rejected.
        iou_with_gt (float): IoU of prediction and ground truth; 0 when rejected.
        hit_at_05 (bool): `iou_with_gt > 0.5` and not rejected.
        generation_recall_hit (bool): Some candidate matched the ground truth.
        n_candidates (int): Number of refined candidates.
        n_reasoning_steps (int): Number of `Reasoning Step` lines in the trace.
        parse_quality (str): How the selection answer was recovered.
        gt_area_fraction (float): Ground-truth area relative to the image.
        trace_text (str): The full selection reply.
        stage_timings (dict[str, float]): Seconds spent per stage.
    """

    sample_id: str
    split: str
    query: str
    gt_box: PixelBox
    predicted_box: Optional[PixelBox]
    rejected: bool
    rejection_reason: Optional[str]
    iou_with_gt: float
    hit_at_05: bool
    generation_recall_hit: bool
    n_candidates: int
    n_reasoning_steps: int
    parse_quality: str
    gt_area_fraction: float
    trace_text: str
    stage_timings: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.hit_at_05 != (self.iou_with_gt > ACCURACY_IOU and not self.rejected):
            raise ValueError(f"Sample '{self.sample_id}': hit_at_05 must equal iou_with_gt > {ACCURACY_IOU} and not rejected.")
        if self.rejected != (self.predicted_box is None):
            raise ValueError(f"Sample '{self.sample_id}': exactly one of predicted_box and rejected must be set.")

    def to_dict(self) -> dict:
        data = asdict(self)
        data["gt_box"] = self.gt_box.to_list()
        data["predicted_box"] = self.predicted_box.to_list() if self.predicted_box else None
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "SampleOutcome":
        values = dict(data)
        values["gt_box"] = PixelBox.from_list(values["gt_box"])
        values["predicted_box"] = PixelBox.from_list(values["predicted_box"]) if values.get("predicted_box") else None
        values["stage_timings"] = dict(values.get("stage_timings") or {})
        return cls(**values)


def judge_sample(result: GroundingResult, record: DatasetRecord, recall_iou: float = 0.5) -> SampleOutcome:
    """Scores a grounding result.

    A hit needs IoU strictly above 0.5. Generation recall counts a hit when any
    refined candidate, of either tier, overlaps the ground truth at IoU >= `recall_iou`,
    regardless of whether the query was rejected.

    Args:
        result (GroundingResult): Result for the record's image and query.
        record (DatasetRecord): The sample being judged.
        recall_iou (float): Matching threshold for generation recall.

    Returns:
        SampleOutcome: The verdict.
    """
    overlap = 0.0 if result.rejected else iou(result.predicted_box, record.gt_box)
    candidates = result.candidate_set.candidates
    recalled = any(iou(candidate.box, record.gt_box) >= recall_iou for candidate in candidates)
    return SampleOutcome(
        sample_id=record.sample_id,
        split=record.split,
        query=record.query,
        gt_box=record.gt_box,
        predicted_box=result.predicted_box,
        rejected=result.rejected,
        rejection_reason=result.rejection_reason.value if result.rejection_reason else None,
        iou_with_gt=overlap,
        hit_at_05=(not result.rejected) and overlap > ACCURACY_IOU,
        generation_recall_hit=recalled,
        n_candidates=len(candidates),
        n_reasoning_steps=len(result.trace.steps),
        parse_quality=result.trace.parse_quality.value,
        gt_area_fraction=area_fraction(record.gt_box, result.candidate_set.image_dims),
        trace_text=result.trace.raw_text,
        stage_timings=dict(result.stage_timings),
    )
