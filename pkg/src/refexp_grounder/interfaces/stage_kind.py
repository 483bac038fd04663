"""Defines the stages of the grounding pipeline."""

# Copyright (c) 2025 Linus Held. All rights reserved.

from enum import Enum


class StageKind(str, Enum):
    """
    Enumeration of the pipeline stages, in execution order.
    The values are used as timing keys and in stage-tagged error messages.
    """

    CAPTION = "caption"
    CONCEPTS = "concepts"
    DETECTION = "detection"
    REFINEMENT = "refinement"
    DESCRIPTION = "description"
    SELECTION = "selection"
