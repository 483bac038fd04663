"""Stage turning raw detections into the ranked candidate set."""

# Copyright (c) 2025 Linus Held. All rights reserved.

from ..geometry import DEFAULT_MIN_AREA_FRACTION, DEFAULT_NMS_IOU
from ..interfaces import StageInterface, StageKind
from .context import GroundingContext
from .operations import DEFAULT_MAX_PRIMARY, refine_candidates


class RefinementStage(StageInterface):
    """Applies the area filter, area-priority NMS, the descending-area sort and the primary split.

    Args:
        min_area_fraction (float): Boxes below this share of the image are dropped.
        nms_iou (float): Suppression threshold.
        max_primary (int): Number of largest candidates that get described.
    """

    kind = StageKind.REFINEMENT
    needs_renderer = False

    def __init__(self, min_area_fraction: float = DEFAULT_MIN_AREA_FRACTION, nms_iou: float = DEFAULT_NMS_IOU, max_primary: int = DEFAULT_MAX_PRIMARY):
        self.min_area_fraction = min_area_fraction
        self.nms_iou = nms_iou
        self.max_primary = max_primary

    def run(self, context: GroundingContext) -> GroundingContext:
        context.require("detections")
        candidate_set = refine_candidates(list(context.detections), context.image.dims, context.caption or "", self.min_area_fraction, self.nms_iou, self.max_primary)
        return context.evolve(candidate_set=candidate_set)

    def to_dict(self) -> dict:
        return {"type": "RefinementStage", "min_area_fraction": self.min_area_fraction, "nms_iou": self.nms_iou, "max_primary": self.max_primary}
