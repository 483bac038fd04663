"""Prompt rendering and visual prompts."""

# Copyright (c) 2025 Linus Held. All rights reserved.

from .renderer import DEFAULT_BOX_FORMAT_LABEL, DEFAULT_VISUAL_PROMPT_NAME, MainEntry, OtherEntry, PromptBundle, PromptRenderer
from .visual_prompt import VisualPromptSpec, outline_ring, render_visual_prompt_image
from .vocabulary import DEFAULT_NOUN_EXAMPLES

__all__ = [
    "DEFAULT_BOX_FORMAT_LABEL",
    "DEFAULT_NOUN_EXAMPLES",
    "DEFAULT_VISUAL_PROMPT_NAME",
    "MainEntry",
    "OtherEntry",
    "PromptBundle",
    "PromptRenderer",
    "VisualPromptSpec",
    "outline_ring",
    "render_visual_prompt_image",
]
