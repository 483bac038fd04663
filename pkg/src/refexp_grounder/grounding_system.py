"""The default grounding system: caption, concepts, detection, refinement, description, selection."""

# Copyright (c) 2025 Linus Held. All rights reserved.

from pathlib import Path
from typing import Optional

from .config import RunConfig
from .core import SUBSTITUTION_MODES, CaptionStage, ConceptStage, DescriptionStage, DetectionStage, PipelineBlock, RefinementStage, SelectionStage
from .errors import ConfigError
from .prompts import PromptRenderer
from .system_base import SystemBase

ABLATION_MODES = ("caption", *SUBSTITUTION_MODES)


class GroundingSystem(SystemBase):
    """Grounding system whose layout follows the run configuration.

    The layout is either built from the configuration or, when `layout_path` is
    given, loaded from a JSON or YAML layout file.
    """

    def __init__(
        self,
        config: RunConfig,
        mode: str = "caption",
        layout_path: Optional[str] = None,
        renderer: Optional[PromptRenderer] = None,
        name: str = "grounding",
    ):
        """Initializes a grounding system.

        Args:
            config (RunConfig): Validated run configuration.
            mode (str): `caption` describes candidates with the MLLM; `query_echo`
                and `query_plus` substitute the ground-truth candidate's
                description with the query (plus caption).
            layout_path (Optional[str]): Stage layout file replacing the
                configured layout.
            renderer (Optional[PromptRenderer]): Prompt renderer to use.
            name (str): The descriptive name of the system.

        Raises:
            ConfigError: If the mode is unknown.
        """
        if mode not in ABLATION_MODES:
            raise ConfigError(f"Unknown mode '{mode}'. Expected one of {', '.join(ABLATION_MODES)}.")
        self.mode = mode
        self.layout_path = layout_path
        super().__init__(name, config, renderer)

    def configure_system(self):
        """Builds the layout from the configuration or loads it from `layout_path`.

        Raises:
            ConfigError: If the layout file extension is not supported.
        """
        if self.layout_path is not None:
            extension = Path(self.layout_path).suffix.lower()
            if extension == ".json":
                self.load_layout_json(self.layout_path)
            elif extension in [".yaml", ".yml"]:
                self.load_layout_yaml(self.layout_path)
            else:
                raise ConfigError(f"Unsupported file format: '{extension}'. Please provide a .json, .yaml, or .yml file.")
            return

        cfg = self.config
        description = cfg.description
        self.system_layout = PipelineBlock(
            self.name,
            [
                CaptionStage(renderer=self.renderer),
                ConceptStage(cfg.concepts.use_caption, cfg.concepts.noun_examples, renderer=self.renderer),
                DetectionStage(cfg.detector.confidence_threshold, cfg.max_workers),
                RefinementStage(cfg.refinement.min_area_fraction, cfg.refinement.nms_iou, cfg.refinement.max_primary),
                DescriptionStage(
                    self_consistency_n=description.self_consistency_n,
                    substitution=None if self.mode == "caption" else self.mode,
                    visual_prompt=description.visual_prompt.model_dump(),
                    visual_prompt_name=description.visual_prompt_name,
                    box_format_label=description.box_format_label,
                    max_workers=cfg.max_workers,
                    renderer=self.renderer,
                ),
                SelectionStage(cfg.selection.rejection_tokens, cfg.selection.max_reprompts, description.box_format_label, renderer=self.renderer),
            ],
            record_timings=cfg.record_timings,
        )
