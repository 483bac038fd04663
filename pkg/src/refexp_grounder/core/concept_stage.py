"""Stage extracting candidate concepts from the query."""

# Copyright (c) 2025 Linus Held. All rights reserved.

from typing import Optional

from ..interfaces import StageInterface, StageKind
from ..prompts import PromptRenderer
from .context import GroundingContext
from .operations import extract_concepts


class ConceptStage(StageInterface):
    """Turns the query (enriched with the caption) into a concept set.

    Args:
        use_caption (bool): False selects the query-only extractor prompt.
        noun_examples (Optional[list[str]]): Vocabulary hint for the extractor;
            None keeps the default category list.
        renderer (Optional[PromptRenderer]): Prompt renderer to use.
    """

    kind = StageKind.CONCEPTS
    needs_renderer = True

    def __init__(self, use_caption: bool = True, noun_examples: Optional[list[str]] = None, renderer: Optional[PromptRenderer] = None):
        self.use_caption = use_caption
        self.noun_examples = list(noun_examples) if noun_examples is not None else None
        self.renderer = renderer or PromptRenderer()

    def run(self, context: GroundingContext) -> GroundingContext:
        caption = context.caption or ""
        concepts = extract_concepts(context.query, caption, context.backends.llm, self.renderer, self.noun_examples, self.use_caption)
        return context.evolve(concepts=concepts)

    def to_dict(self) -> dict:
        return {"type": "ConceptStage", "use_caption": self.use_caption, "noun_examples": self.noun_examples}
