"""Immutable state threaded through the pipeline stages."""

# Copyright (c) 2025 Linus Held. All rights reserved.

from dataclasses import dataclass, field, replace
from typing import Optional

from ..gateway.messages import Detection, ImagePayload
from ..gateway.provider import BackendSet
from ..geometry import PixelBox
from .types import CandidateSet, ConceptSet, ReasoningTrace


@dataclass(frozen=True)
class GroundingContext:
    """Everything known about one (image, query) pair at a point in the pipeline.

    Stages return updated copies via `evolve`; the input context is never mutated.

    Attributes:
        image (ImagePayload): The image being grounded.
        query (str): The referring expression.
        backends (BackendSet): Model roles bound to this image.
        reference_box (Optional[PixelBox]): Ground-truth box, only set in query
            substitution ablations.
    """

    image: ImagePayload
    query: str
    backends: BackendSet = field(repr=False)
    reference_box: Optional[PixelBox] = None
    caption: Optional[str] = None
    concepts: Optional[ConceptSet] = None
    detections: Optional[tuple[Detection, ...]] = None
    candidate_set: Optional[CandidateSet] = None
    trace: Optional[ReasoningTrace] = None
    stage_timings: dict[str, float] = field(default_factory=dict)

    def evolve(self, **changes) -> "GroundingContext":
        return replace(self, **changes)

    def with_timing(self, stage: str, seconds: float) -> "GroundingContext":
        return replace(self, stage_timings={**self.stage_timings, stage: seconds})

    def require(self, *names: str):
        """Raises ValueError when an earlier stage's output is missing."""
        missing = [name for name in names if getattr(self, name) is None]
        if missing:
            raise ValueError(f"Context lacks {', '.join(missing)}; check the stage order.")
