"""Deterministic rendering of the grounding prompts."""

# Copyright (c) 2025 Linus Held. All rights reserved.

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Optional, Union

from ..errors import ConfigError
from ..gateway.messages import ChatMessage, ImagePayload
from ..geometry import NormalizedBox
from .templates import DEFAULT_TEMPLATES
from .vocabulary import DEFAULT_NOUN_EXAMPLES

logger = logging.getLogger(__name__)

DEFAULT_BOX_FORMAT_LABEL = "center-based [center_x, center_y, width, height]"
DEFAULT_VISUAL_PROMPT_NAME = "a red rectangle"


@dataclass(frozen=True)
class PromptBundle:
    """A rendered request: optional system text, user text and optional image."""

    system_text: Optional[str]
    user_text: str
    image: Optional[ImagePayload] = None

    def to_messages(self) -> list[ChatMessage]:
        """Converts the bundle to the chat message list sent to a backend."""
        messages = []
        if self.system_text is not None:
            messages.append(ChatMessage.system(self.system_text))
        messages.append(ChatMessage.user(self.user_text, self.image))
        return messages


class MainEntry(NamedTuple):
    """A primary candidate line in the selection prompt."""

    index: int
    concept: str
    box: NormalizedBox
    description: str


class OtherEntry(NamedTuple):
    """A coordinate-only candidate line in the selection prompt."""

    index: int
    concept: str
    box: NormalizedBox


def _box_fields(box: NormalizedBox) -> dict[str, float]:
    return {"center_x": box.center_x, "center_y": box.center_y, "width": box.width, "height": box.height}


class PromptRenderer:
    """Renders every prompt the pipeline sends, from a fixed set of templates.

    Args:
        templates (Optional[dict[str, str]]): Replacements for individual default
            templates, keyed by template name.

    Raises:
        ConfigError: If an override names an unknown template.
    """

    def __init__(self, templates: Optional[dict[str, str]] = None):
        overrides = templates or {}
        unknown = sorted(set(overrides) - set(DEFAULT_TEMPLATES))
        if unknown:
            raise ConfigError(f"Unknown prompt template(s): {', '.join(unknown)}")
        self.templates = {**DEFAULT_TEMPLATES, **overrides}

    @classmethod
    def from_directory(cls, template_dir: Union[str, Path]) -> "PromptRenderer":
        """Builds a renderer whose templates are overridden by `<NAME>.txt` files.

        Files whose stem is not a template name are ignored with a warning.

        Raises:
            ConfigError: If the directory does not exist.
        """
        directory = Path(template_dir)
        if not directory.is_dir():
            raise ConfigError(f"Prompt template directory '{directory}' does not exist.")
        overrides = {}
        for path in sorted(directory.glob("*.txt")):
            if path.stem in DEFAULT_TEMPLATES:
                overrides[path.stem] = path.read_text(encoding="utf-8")
            else:
                logger.warning("Ignoring unknown prompt template file %s", path)
        logger.info("Loaded %d prompt template override(s) from %s", len(overrides), directory)
        return cls(overrides)

    @classmethod
    def for_template_dir(cls, template_dir: Optional[Union[str, Path]]) -> "PromptRenderer":
        """Default renderer, or one overridden from `template_dir` when it is set."""
        return cls.from_directory(template_dir) if template_dir else cls()

    def render_concept_extraction(
        self,
        query: str,
        global_caption: str,
        noun_examples: Optional[list[str]] = None,
        use_caption: bool = True,
    ) -> PromptBundle:
        """Renders the concept-extraction request.

        Args:
            query (str): The referring expression.
            global_caption (str): The image caption; ignored when `use_caption` is False.
            noun_examples (Optional[list[str]]): Vocabulary hint, comma-joined into
                the system text. Defaults to the 80 COCO category names.
            use_caption (bool): False selects the query-only extractor, whose user
                text is the bare query.

        Raises:
            ValueError: If the query is empty.
        """
        if not query.strip():
            raise ValueError("Query must not be empty.")
        nouns = ", ".join(noun_examples if noun_examples is not None else DEFAULT_NOUN_EXAMPLES)

        if not use_caption:
            return PromptBundle(self.templates["VG_TEXT_GROUNDER_w_QUERY"].format(noun_examples=nouns), query)

        return PromptBundle(
            system_text=self.templates["VG_TEXT_GROUNDER"].format(noun_examples=nouns),
            user_text=self.templates["VG_TEXT_GROUNDER_QUERY"].format(image_desc=global_caption, query=query),
        )

    def render_global_caption_prompt(self, image: Optional[ImagePayload] = None) -> PromptBundle:
        return PromptBundle(None, self.templates["MLLM_GLOBAL_DESC_PROMPT"], image)

    def render_instance_description_prompt(
        self,
        concept: str,
        box: NormalizedBox,
        box_format_label: str = DEFAULT_BOX_FORMAT_LABEL,
        visual_prompt_name: str = DEFAULT_VISUAL_PROMPT_NAME,
        image: Optional[ImagePayload] = None,
    ) -> PromptBundle:
        """Renders the per-candidate description request for the MLLM.

        Args:
            concept (str): Concept name the detector attached to the box.
            box (NormalizedBox): Candidate box in normalized center format.
            box_format_label (str): Name of the coordinate format.
            visual_prompt_name (str): Phrase naming the marker drawn on the image.
            image (Optional[ImagePayload]): The visual-prompt image to attach.
        """
        user_text = self.templates["MLLM_INSTANCE_DESC_PROMPT"].format(
            visual_prompt=visual_prompt_name,
            name=concept,
            a1=box.center_x,
            a2=box.center_y,
            a3=box.width,
            a4=box.height,
            box_format=box_format_label,
        )
        system_text = self.templates["MLLM_INSTANCE_DESC_SYSTEM_PROMPT"].format(visual_prompt=visual_prompt_name)
        return PromptBundle(system_text, user_text, image)

    def render_selection_prompt(
        self,
        query: str,
        global_desc: str,
        main: list[MainEntry],
        other: list[OtherEntry],
        box_format_label: str = DEFAULT_BOX_FORMAT_LABEL,
    ) -> PromptBundle:
        """Renders the chain-of-thought selection request over all candidates.

        Primary candidates carry their description; the remaining ones are listed
        with concept and coordinates only. The user message is the raw query.

        Raises:
            ValueError: If indices are not exactly 1..n with primaries first.
        """
        indices = [entry.index for entry in main] + [entry.index for entry in other]
        if indices != list(range(1, len(indices) + 1)):
            raise ValueError(f"Candidate indices must run 1..n with primaries first, got {indices}.")

        main_lines = [
            self.templates["MAIN_INSTANCE_TEXT"].format(idx=entry.index, category_name=entry.concept, description=entry.description, **_box_fields(entry.box))
            for entry in main
        ]
        other_lines = [self.templates["OTHER_INSTANCE_TEXT"].format(idx=entry.index, category_name=entry.concept, **_box_fields(entry.box)) for entry in other]

        instance_desc = self.templates["LLM_INSTANCE_DESC"].format(
            main_instance_descs="\n".join(main_lines),
            other_instance_descs="\n".join(other_lines),
            box_format=box_format_label,
        )
        system_text = self.templates["LLM_SYSTEM_PROMPT_WITH_COT"].format(global_desc=global_desc, instance_desc=instance_desc)
        return PromptBundle(system_text, query)

    def render_aggregation_prompt(self, descriptions: list[str]) -> PromptBundle:
        """Renders the self-consistency request that merges sampled descriptions.

        A single description yields the pass-through instruction.

        Raises:
            ValueError: If no description is given.
        """
        if not descriptions:
            raise ValueError("At least one description is required for aggregation.")
        if len(descriptions) == 1:
            system_text = self.templates["AGGREGATION_PASSTHROUGH_PROMPT"]
        else:
            system_text = self.templates["AGGREGATION_SYSTEM_PROMPT"].format(n=len(descriptions))
        items = "\n".join(self.templates["AGGREGATION_ITEM"].format(idx=i, description=text) for i, text in enumerate(descriptions, start=1))
        return PromptBundle(system_text, self.templates["AGGREGATION_QUERY"].format(items=items))

    def render_reprompt(self) -> str:
        return self.templates["REPROMPT_MESSAGE"]
