"""Scene manifests: the ground truth behind synthetic scenes and oracle backends."""

# Copyright (c) 2025 Linus Held. All rights reserved.

from pathlib import Path
from typing import Optional, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..errors import ConfigError
from ..geometry import ImageDims, PixelBox, iou


class SceneObject(BaseModel):
    """One object in a scene.

    Attributes:
        object_id (str): Unique id within the scene.
        label (str): Category name, lowercase.
        synonyms (list[str]): Alternative names a detector vocabulary may use.
        color (str): Fill color name.
        attribute_sentence (str): Ground-truth description, e.g. "a white chair".
        box (list[float]): `[x_min, y_min, x_max, y_max]` in top-left-origin pixels.
        confidence (float): Score the oracle detector compares to its threshold.
    """

    model_config = ConfigDict(extra="forbid")

    object_id: str
    label: str
    synonyms: list[str] = Field(default_factory=list)
    color: str
    attribute_sentence: str
    box: list[float]
    confidence: float = Field(default=1.0, ge=0.0, le=1.0)

    @field_validator("box")
    @classmethod
    def _valid_box(cls, value: list[float]) -> list[float]:
        PixelBox.from_list(value)
        return value

    @property
    def pixel_box(self) -> PixelBox:
        return PixelBox.from_list(self.box)

    @property
    def names(self) -> list[str]:
        """Label followed by synonyms."""
        return [self.label, *self.synonyms]


class SceneQuery(BaseModel):
    """A referring expression posed against a scene; `target` is None for no-target queries."""

    model_config = ConfigDict(extra="forbid")

    text: str
    target: Optional[str] = None


class SceneManifest(BaseModel):
    """Ground truth for one synthetic scene.

    Raises:
        pydantic.ValidationError: If a box exceeds the image or a query targets
            an unknown object id.
    """

    model_config = ConfigDict(extra="forbid")

    scene_id: str
    width: int = Field(ge=1)
    height: int = Field(ge=1)
    caption: str
    objects: list[SceneObject]
    queries: list[SceneQuery] = Field(default_factory=list)
    metadata: dict[str, Union[bool, int, float, str]] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check_consistency(self) -> "SceneManifest":
        dims = self.dims
        ids = set()
        for obj in self.objects:
            if not obj.pixel_box.fits_within(dims):
                raise ValueError(f"object '{obj.object_id}' box {obj.box} exceeds image {self.width}x{self.height}")
            if obj.object_id in ids:
                raise ValueError(f"duplicate object id '{obj.object_id}'")
            ids.add(obj.object_id)
        for query in self.queries:
            if query.target is not None and query.target not in ids:
                raise ValueError(f"query '{query.text}' targets unknown object '{query.target}'")
        return self

    @property
    def dims(self) -> ImageDims:
        return ImageDims(self.width, self.height)

    def object_by_id(self, object_id: str) -> SceneObject:
        for obj in self.objects:
            if obj.object_id == object_id:
                return obj
        raise KeyError(object_id)

    def match_box(self, box: PixelBox, min_iou: float = 0.5) -> Optional[SceneObject]:
        """Returns the object overlapping `box` best, if that overlap reaches `min_iou`."""
        best, best_iou = None, 0.0
        for obj in self.objects:
            overlap = iou(obj.pixel_box, box)
            if overlap > best_iou:
                best, best_iou = obj, overlap
        return best if best_iou >= min_iou else None

    def query_for_object(self, object_id: str) -> Optional[str]:
        """Returns the first query text targeting an object."""
        for query in self.queries:
            if query.target == object_id:
                return query.text
        return None

    def to_yaml(self, path: Union[str, Path]):
        """Writes the manifest as a YAML document."""
        with open(path, "w", encoding="utf-8") as f:
            yaml.safe_dump(self.model_dump(mode="json"), f, sort_keys=False, default_flow_style=None)

    @classmethod
    def from_yaml(cls, path: Union[str, Path]) -> "SceneManifest":
        """Loads and validates a manifest.

        Raises:
            ConfigError: If the file is missing or fails validation.
        """
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = yaml.safe_load(f)
            return cls.model_validate(data)
        except OSError as exc:
            raise ConfigError(f"Cannot read scene manifest '{path}': {exc}") from exc
        except (yaml.YAMLError, ValidationError) as exc:
            raise ConfigError(f"Invalid scene manifest '{path}': {exc}") from exc


def manifest_path_for(image_path: Union[str, Path]) -> Path:
    """Returns the manifest path that sits next to a scene image (`scene.png` -> `scene.yaml`)."""
    return Path(image_path).with_suffix(".yaml")
