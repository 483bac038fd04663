"""Stage describing the primary candidates."""

# Copyright (c) 2025 Linus Held. All rights reserved.

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Optional

from ..geometry import iou
from ..interfaces import StageInterface, StageKind
from ..prompts import DEFAULT_BOX_FORMAT_LABEL, DEFAULT_VISUAL_PROMPT_NAME, PromptRenderer, VisualPromptSpec
from .context import GroundingContext
from .operations import describe_with_self_consistency
from .types import Candidate

logger = logging.getLogger(__name__)

SUBSTITUTION_MODES = ("query_echo", "query_plus")
SUBSTITUTION_IOU = 0.5


class DescriptionStage(StageInterface):
    """Attaches a description to every primary candidate.

    In a substitution ablation (`query_echo` or `query_plus`) the primaries that
    overlap the context's reference box at IoU >= 0.5 receive the query (plus
    the caption for `query_plus`) instead of a model description.

    Args:
        self_consistency_n (int): Descriptions sampled per candidate before consolidation.
        substitution (Optional[str]): None, `query_echo` or `query_plus`.
        visual_prompt (Optional[dict]): `outline_color`, `outline_width`, `blur_sigma`.
        visual_prompt_name (str): Marker phrase used in the prompt.
        box_format_label (str): Coordinate format name used in the prompt.
        max_workers (int): Candidates described concurrently.
        renderer (Optional[PromptRenderer]): Prompt renderer to use.
    """

    kind = StageKind.DESCRIPTION
    needs_renderer = True

    def __init__(
        self,
        self_consistency_n: int = 1,
        substitution: Optional[str] = None,
        visual_prompt: Optional[dict] = None,
        visual_prompt_name: str = DEFAULT_VISUAL_PROMPT_NAME,
        box_format_label: str = DEFAULT_BOX_FORMAT_LABEL,
        max_workers: int = 4,
        renderer: Optional[PromptRenderer] = None,
    ):
        if self_consistency_n < 1:
            raise ValueError(f"self_consistency_n must be at least 1, got {self_consistency_n}.")
        if substitution is not None and substitution not in SUBSTITUTION_MODES:
            raise ValueError(f"Unknown substitution mode: {substitution}")
        self.self_consistency_n = self_consistency_n
        self.substitution = substitution
        settings = dict(visual_prompt or {})
        if "outline_color" in settings:
            settings["outline_color"] = tuple(settings["outline_color"])
        self.visual_prompt = VisualPromptSpec(**settings)
        self.visual_prompt_name = visual_prompt_name
        self.box_format_label = box_format_label
        self.max_workers = max_workers
        self.renderer = renderer or PromptRenderer()

    def _substitute(self, context: GroundingContext, candidate: Candidate) -> Optional[str]:
        if self.substitution is None or iou(candidate.box, context.reference_box) < SUBSTITUTION_IOU:
            return None
        if self.substitution == "query_echo":
            return context.query
        return f"{context.query} {context.caption or ''}".rstrip()

    def _describe(self, context: GroundingContext, candidate: Candidate) -> str:
        substituted = self._substitute(context, candidate)
        if substituted is not None:
            return substituted
        return describe_with_self_consistency(
            context.image,
            candidate,
            self.self_consistency_n,
            context.backends.mllm,
            context.backends.llm,
            self.renderer,
            self.visual_prompt,
            self.visual_prompt_name,
            self.box_format_label,
        )

    def run(self, context: GroundingContext) -> GroundingContext:
        context.require("candidate_set")
        if self.substitution is not None:
            context.require("reference_box")
        primaries = context.candidate_set.primaries
        with ThreadPoolExecutor(max_workers=max(1, min(self.max_workers, len(primaries)))) as pool:
            texts = list(pool.map(lambda candidate: self._describe(context, candidate), primaries))
        descriptions = {candidate.index: text for candidate, text in zip(primaries, texts)}
        logger.info("Described %d primary candidate(s)", len(descriptions))
        return context.evolve(candidate_set=context.candidate_set.with_descriptions(descriptions))

    def to_dict(self) -> dict:
        return {
            "type": "DescriptionStage",
            "self_consistency_n": self.self_consistency_n,
            "substitution": self.substitution,
            "visual_prompt": {
                "outline_color": list(self.visual_prompt.outline_color),
                "outline_width": self.visual_prompt.outline_width,
                "blur_sigma": self.visual_prompt.blur_sigma,
            },
            "visual_prompt_name": self.visual_prompt_name,
            "box_format_label": self.box_format_label,
            "max_workers": self.max_workers,
        }
