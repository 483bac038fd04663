"""Role-checked entry points for the three model roles."""

# Copyright (c) 2025 Linus Held. All rights reserved.

from typing import Optional

from ..errors import MalformedResponseError
from ..interfaces import ChatBackend, DetectorBackend
from .messages import ChatMessage, Detection, ImagePayload


def llm_complete(backend: ChatBackend, messages: list[ChatMessage], sample_index: int = 0) -> str:
    """Sends a text-only conversation to the LLM role.

    Raises:
        ValueError: If any message carries an image.
    """
    if any(message.image is not None for message in messages):
        raise ValueError("LLM requests must not carry images.")
    return backend.complete(messages, sample_index=sample_index)


def mllm_complete(backend: ChatBackend, messages: list[ChatMessage], sample_index: int = 0) -> str:
    """Sends a conversation with exactly one image to the MLLM role.

    Raises:
        ValueError: If the conversation carries no image or more than one.
    """
    n_images = sum(1 for message in messages if message.image is not None)
    if n_images != 1:
        raise ValueError(f"MLLM requests must carry exactly one image, got {n_images}.")
    return backend.complete(messages, sample_index=sample_index)


def detect(backend: DetectorBackend, image: ImagePayload, vocabulary: list[str], confidence_threshold: Optional[float] = None) -> list[Detection]:
    """Runs the open-vocabulary detector and re-checks the box bounds.

    Raises:
        ValueError: If the vocabulary is empty.
        MalformedResponseError: If the backend returns a box outside the image.
    """
    if not vocabulary:
        raise ValueError("Detector vocabulary must not be empty.")
    detections = backend.detect(image, vocabulary, confidence_threshold)
    for detection in detections:
        if not detection.box.fits_within(image.dims):
            raise MalformedResponseError(f"Detector returned box {detection.box.to_list()} outside image {image.dims.width}x{image.dims.height}.")
    return detections
