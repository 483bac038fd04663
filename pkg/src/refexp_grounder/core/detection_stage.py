"""Stage running the open-vocabulary detector once per concept."""

# Copyright (c) 2025 Linus Held. All rights reserved.

from typing import Optional

from ..interfaces import StageInterface, StageKind
from .context import GroundingContext
from .operations import collect_detections


class DetectionStage(StageInterface):
    """Fans detection out across concepts and keeps the union in concept order."""

    kind = StageKind.DETECTION
    needs_renderer = False

    def __init__(self, confidence_threshold: Optional[float] = None, max_workers: int = 4):
        self.confidence_threshold = confidence_threshold
        self.max_workers = max_workers

    def run(self, context: GroundingContext) -> GroundingContext:
        context.require("concepts")
        detections = collect_detections(context.image, context.concepts, context.backends.detector, self.confidence_threshold, self.max_workers)
        return context.evolve(detections=tuple(detections))

    def to_dict(self) -> dict:
        return {"type": "DetectionStage", "confidence_threshold": self.confidence_threshold, "max_workers": self.max_workers}
