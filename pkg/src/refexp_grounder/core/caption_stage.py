"""Stage producing the global image caption."""

# Copyright (c) 2025 Linus Held. All rights reserved.

from typing import Optional

from ..interfaces import StageInterface, StageKind
from ..prompts import PromptRenderer
from .context import GroundingContext
from .operations import generate_global_caption


class CaptionStage(StageInterface):
    """Asks the MLLM for the global description that gives every later step its scene context."""

    kind = StageKind.CAPTION
    needs_renderer = True

    def __init__(self, renderer: Optional[PromptRenderer] = None):
        self.renderer = renderer or PromptRenderer()

    def run(self, context: GroundingContext) -> GroundingContext:
        return context.evolve(caption=generate_global_caption(context.image, context.backends.mllm, self.renderer))

    def to_dict(self) -> dict:
        return {"type": "CaptionStage"}
