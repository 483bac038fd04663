"""Factory for creating pipeline stages from serialized layouts."""

# Copyright (c) 2025 Linus Held. All rights reserved.

from typing import Any, Optional, Type

from ..interfaces import StageInterface
from ..prompts import PromptRenderer
from .caption_stage import CaptionStage
from .concept_stage import ConceptStage
from .description_stage import DescriptionStage
from .detection_stage import DetectionStage
from .pipeline_block import PipelineBlock
from .refinement_stage import RefinementStage
from .selection_stage import SelectionStage


class StageFactory:
    """Factory class to reconstruct stages from dictionaries.

    Handles the recursive instantiation of pipeline blocks and hands the shared
    prompt renderer to every stage that renders prompts.
    """

    _REGISTRY: dict[str, Type[StageInterface]] = {
        "PipelineBlock": PipelineBlock,
        "CaptionStage": CaptionStage,
        "ConceptStage": ConceptStage,
        "DetectionStage": DetectionStage,
        "RefinementStage": RefinementStage,
        "DescriptionStage": DescriptionStage,
        "SelectionStage": SelectionStage,
    }

    @staticmethod
    def from_dict(data: dict[str, Any], renderer: Optional[PromptRenderer] = None) -> StageInterface:
        """Creates a stage instance from a layout dictionary.

        Args:
            data (dict[str, Any]): A dictionary containing the stage
                configuration. Must include a 'type' key.
            renderer (Optional[PromptRenderer]): Renderer passed to prompt-rendering stages.

        Returns:
            StageInterface: An initialized instance of the specified stage.

        Raises:
            ValueError: If the 'type' is unknown or the parameters do not fit the stage.
        """
        params = dict(data)
        stage_type = params.pop("type", None)

        if stage_type not in StageFactory._REGISTRY:
            raise ValueError(f"Unknown stage type: {stage_type}")

        if stage_type == "PipelineBlock":
            stages = [StageFactory.from_dict(sub, renderer) for sub in params.pop("stages", [])]
            return PipelineBlock(params.pop("name", "pipeline"), stages, **params)

        stage_class = StageFactory._REGISTRY[stage_type]
        if getattr(stage_class, "needs_renderer", False):
            params["renderer"] = renderer
        try:
            return stage_class(**params)
        except TypeError as exc:
            raise ValueError(f"Invalid parameters for {stage_type}: {exc}") from exc
