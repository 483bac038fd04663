"""Stage choosing the referred candidate."""

# Copyright (c) 2025 Linus Held. All rights reserved.

from typing import Optional

from ..interfaces import StageInterface, StageKind
from ..prompts import DEFAULT_BOX_FORMAT_LABEL, PromptRenderer
from .context import GroundingContext
from .operations import select_candidate
from .trace_parser import DEFAULT_REJECTION_TOKENS


class SelectionStage(StageInterface):
    """Runs the chain-of-thought selection over the described candidate set."""

    kind = StageKind.SELECTION
    needs_renderer = True

    def __init__(
        self,
        rejection_tokens: Optional[list[str]] = None,
        max_reprompts: int = 1,
        box_format_label: str = DEFAULT_BOX_FORMAT_LABEL,
        renderer: Optional[PromptRenderer] = None,
    ):
        self.rejection_tokens = list(rejection_tokens) if rejection_tokens is not None else list(DEFAULT_REJECTION_TOKENS)
        self.max_reprompts = max_reprompts
        self.box_format_label = box_format_label
        self.renderer = renderer or PromptRenderer()

    def run(self, context: GroundingContext) -> GroundingContext:
        context.require("candidate_set")
        trace = select_candidate(context.query, context.candidate_set, context.backends.llm, self.renderer, self.rejection_tokens, self.max_reprompts, self.box_format_label)
        return context.evolve(trace=trace)

    def to_dict(self) -> dict:
        return {"type": "SelectionStage", "rejection_tokens": self.rejection_tokens, "max_reprompts": self.max_reprompts, "box_format_label": self.box_format_label}
