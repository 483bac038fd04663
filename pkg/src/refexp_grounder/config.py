"""Run configuration: one validated tree loaded from YAML or JSON."""

# Copyright (c) 2025 Linus Held. All rights reserved.

import json
import logging
from pathlib import Path
from typing import Literal, Optional, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .errors import ConfigError
from .gateway.endpoint import EndpointConfig
from .prompts.renderer import DEFAULT_BOX_FORMAT_LABEL, DEFAULT_VISUAL_PROMPT_NAME
from .prompts.visual_prompt import VisualPromptSpec
from .prompts.vocabulary import DEFAULT_NOUN_EXAMPLES

logger = logging.getLogger(__name__)


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class RefinementConfig(_Section):
    min_area_fraction: float = Field(default=0.025, ge=0.0, lt=1.0)
    nms_iou: float = Field(default=0.7, gt=0.0, le=1.0)
    max_primary: int = Field(default=10, ge=1)


class VisualPromptConfig(_Section):
    outline_color: tuple[int, int, int] = (255, 0, 0)
    outline_width: int = Field(default=3, ge=1)
    blur_sigma: float = Field(default=10.0, gt=0.0)

    @field_validator("outline_color")
    @classmethod
    def _rgb(cls, value: tuple[int, int, int]) -> tuple[int, int, int]:
        if any(not 0 <= c <= 255 for c in value):
            raise ValueError(f"outline_color channels must lie in [0, 255], got {list(value)}")
        return value

    def to_spec(self) -> VisualPromptSpec:
        return VisualPromptSpec(self.outline_color, self.outline_width, self.blur_sigma)


class DescriptionConfig(_Section):
    self_consistency_n: int = Field(default=1, ge=1)
    visual_prompt: VisualPromptConfig = VisualPromptConfig()
    visual_prompt_name: str = DEFAULT_VISUAL_PROMPT_NAME
    box_format_label: str = DEFAULT_BOX_FORMAT_LABEL


class ConceptConfig(_Section):
    use_caption: bool = True
    noun_examples: list[str] = Field(default_factory=lambda: list(DEFAULT_NOUN_EXAMPLES))


class SelectionConfig(_Section):
    rejection_tokens: list[str] = Field(default_factory=lambda: ["none", "no match", "reject"])
    max_reprompts: int = Field(default=1, ge=0)


class PromptConfig(_Section):
    template_dir: Optional[str] = None


class OracleConfig(_Section):
    describe_mode: Literal["attributes", "query_echo", "query_plus"] = "attributes"
    corruption_rate: float = Field(default=0.0, ge=0.0, le=1.0)
    selector_threshold: float = Field(default=1.0, gt=0.0, le=1.0)
    seed: int = 0


class CassetteConfig(_Section):
    mode: Literal["off", "record", "replay"] = "off"
    path: Optional[str] = None
    strict: bool = True

    @model_validator(mode="after")
    def _path_required(self) -> "CassetteConfig":
        if self.mode != "off" and not self.path:
            raise ValueError(f"cassette.path is required in {self.mode} mode")
        return self


class EvaluationConfig(_Section):
    # Capped at 0.5 so that every accuracy hit is also a recall hit.
    recall_iou: float = Field(default=0.5, gt=0.0, le=0.5)


class RunConfig(_Section):
    """Complete, validated configuration of a grounding or benchmark run."""

    llm: EndpointConfig = EndpointConfig()
    mllm: EndpointConfig = EndpointConfig()
    detector: EndpointConfig = EndpointConfig()
    refinement: RefinementConfig = RefinementConfig()
    description: DescriptionConfig = DescriptionConfig()
    concepts: ConceptConfig = ConceptConfig()
    selection: SelectionConfig = SelectionConfig()
    prompts: PromptConfig = PromptConfig()
    oracle: OracleConfig = OracleConfig()
    cassette: CassetteConfig = CassetteConfig()
    evaluation: EvaluationConfig = EvaluationConfig()
    max_workers: int = Field(default=4, ge=1)
    seed: int = 0
    record_timings: bool = True

    @model_validator(mode="after")
    def _sampling_needs_temperature(self) -> "RunConfig":
        if self.description.self_consistency_n > 1 and self.mllm.backend == "http" and self.mllm.temperature == 0:
            raise ValueError("description.self_consistency_n > 1 needs mllm.temperature > 0 for independent samples")
        return self

    def with_updates(self, **sections) -> "RunConfig":
        """Returns a validated copy with top-level fields replaced."""
        try:
            return RunConfig.model_validate({**self.model_dump(), **sections})
        except ValidationError as exc:
            raise ConfigError(f"Invalid configuration update: {exc}") from exc


def _resolve(value: Optional[str], base: Path) -> Optional[str]:
    if value is None or Path(value).is_absolute():
        return value
    return str(base / value)


def load_config(path: Union[str, Path]) -> RunConfig:
    """Loads and validates a run configuration.

    The parser is chosen by extension (`.json`, `.yaml`, `.yml`). Relative
    `prompts.template_dir` and `cassette.path` values resolve against the
    config file's directory.

    Raises:
        ConfigError: If the file is missing, has an unsupported extension or
            fails validation.
    """
    config_path = Path(path)
    extension = config_path.suffix.lower()
    if extension not in (".json", ".yaml", ".yml"):
        raise ConfigError(f"Unsupported file format: '{extension}'. Please provide a .json, .yaml, or .yml file.")

    try:
        with open(config_path, "r", encoding="utf-8") as f:
            data = json.load(f) if extension == ".json" else yaml.safe_load(f)
    except OSError as exc:
        raise ConfigError(f"Cannot read config file '{config_path}': {exc}") from exc
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise ConfigError(f"Cannot parse config file '{config_path}': {exc}") from exc

    data = data or {}
    if not isinstance(data, dict):
        raise ConfigError(f"Config file '{config_path}' must hold a mapping at the top level.")

    base = config_path.parent
    if isinstance(data.get("prompts"), dict):
        data["prompts"] = {**data["prompts"], "template_dir": _resolve(data["prompts"].get("template_dir"), base)}
    if isinstance(data.get("cassette"), dict):
        data["cassette"] = {**data["cassette"], "path": _resolve(data["cassette"].get("path"), base)}

    try:
        config = RunConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(f"Invalid config file '{config_path}': {exc}") from exc
    logger.info("Loaded configuration from %s", config_path)
    return config
