"""Request and response value types exchanged with model backends."""

# Copyright (c) 2025 Linus Held. All rights reserved.

import base64
import hashlib
import io
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from pathlib import Path
from typing import Optional, Union

import numpy as np
from PIL import Image

from ..geometry import ImageDims, PixelBox


class Role(str, Enum):
    """Chat roles understood by the chat-completion protocol."""

    SYSTEM = "system"
    USER = "user"
    ASSISTANT = "assistant"


_PIL_FORMATS = {"png": "PNG", "jpeg": "JPEG"}


@dataclass(frozen=True)
class ImagePayload:
    """Encoded raster image plus its dimensions.

    Use the `from_*` constructors; they decode the raster once so that `dims`
    always matches the encoded bytes.
    """

    data: bytes = field(repr=False)
    format: str
    dims: ImageDims

    def __post_init__(self):
        if self.format not in _PIL_FORMATS:
            raise ValueError(f"Unsupported image format: '{self.format}'. Expected png or jpeg.")

    @classmethod
    def from_bytes(cls, data: bytes) -> "ImagePayload":
        """Decodes raw bytes to detect format and dimensions."""
        with Image.open(io.BytesIO(data)) as img:
            fmt = (img.format or "").lower()
            if fmt not in _PIL_FORMATS:
                raise ValueError(f"Unsupported image format: '{fmt}'. Expected png or jpeg.")
            width, height = img.size
        return cls(data=data, format=fmt, dims=ImageDims(width, height))

    @classmethod
    def from_path(cls, path: Union[str, Path]) -> "ImagePayload":
        return cls.from_bytes(Path(path).read_bytes())

    @classmethod
    def from_array(cls, pixels: np.ndarray, fmt: str = "png") -> "ImagePayload":
        """Encodes an `(H, W, 3)` uint8 RGB array."""
        if fmt not in _PIL_FORMATS:
            raise ValueError(f"Unsupported image format: '{fmt}'. Expected png or jpeg.")
        buffer = io.BytesIO()
        Image.fromarray(np.ascontiguousarray(pixels, dtype=np.uint8)).save(buffer, format=_PIL_FORMATS[fmt])
        height, width = pixels.shape[:2]
        return cls(data=buffer.getvalue(), format=fmt, dims=ImageDims(int(width), int(height)))

    def to_array(self) -> np.ndarray:
        """Decodes the payload into an `(H, W, 3)` uint8 RGB array."""
        with Image.open(io.BytesIO(self.data)) as img:
            return np.array(img.convert("RGB"), dtype=np.uint8)

    @cached_property
    def sha256(self) -> str:
        return hashlib.sha256(self.data).hexdigest()

    def to_base64(self) -> str:
        return base64.b64encode(self.data).decode("ascii")

    def to_data_url(self) -> str:
        return f"data:image/{self.format};base64,{self.to_base64()}"


@dataclass(frozen=True)
class ChatMessage:
    """One role-tagged message; only user messages may carry an image."""

    role: Role
    text: str
    image: Optional[ImagePayload] = None

    def __post_init__(self):
        if self.image is not None and self.role != Role.USER:
            raise ValueError(f"Only user messages may carry an image, got role '{self.role.value}'.")

    @classmethod
    def system(cls, text: str) -> "ChatMessage":
        return cls(Role.SYSTEM, text)

    @classmethod
    def user(cls, text: str, image: Optional[ImagePayload] = None) -> "ChatMessage":
        return cls(Role.USER, text, image)

    @classmethod
    def assistant(cls, text: str) -> "ChatMessage":
        return cls(Role.ASSISTANT, text)


def normalize_concept(text: str) -> str:
    """Lowercases and trims a concept label."""
    return text.strip().lower()


@dataclass(frozen=True)
class Detection:
    """A score-free labeled box returned by the open-vocabulary detector."""

    concept: str
    box: PixelBox

    def __post_init__(self):
        if not self.concept or self.concept != normalize_concept(self.concept):
            raise ValueError(f"Detection concept must be non-empty, lowercase and trimmed, got '{self.concept}'.")

    def to_dict(self) -> dict:
        return {"label": self.concept, "box": self.box.to_list()}

    @classmethod
    def from_dict(cls, data: dict) -> "Detection":
        return cls(concept=normalize_concept(str(data["label"])), box=PixelBox.from_list(data["box"]))
