"""Defines the contracts for the three model roles: LLM, MLLM and detector."""

# Copyright (c) 2025 Linus Held. All rights reserved.

from abc import ABC, abstractmethod
from typing import TYPE_CHECKING, Optional

if TYPE_CHECKING:
    from ..gateway.messages import ChatMessage, Detection, ImagePayload


class ChatBackend(ABC):
    """A chat-completion model, either text-only (LLM) or multimodal (MLLM).

    Implementations must be safe to share across threads.
    """

    role_kind: str = "chat"

    @abstractmethod
    def complete(self, messages: list["ChatMessage"], sample_index: int = 0) -> str:
        """Returns the model's reply to a role-tagged conversation.

        Args:
            messages (list[ChatMessage]): The conversation, system message first.
            sample_index (int): Distinguishes repeated stochastic samples of the
                same request (self-consistency); 0 for single-shot calls.

        Returns:
            str: The model's text reply.
        """
        pass


class DetectorBackend(ABC):
    """An open-vocabulary detector returning labeled boxes without scores."""

    role_kind: str = "detector"

    @abstractmethod
    def detect(self, image: "ImagePayload", vocabulary: list[str], confidence_threshold: Optional[float] = None) -> list["Detection"]:
        """Detects instances of each vocabulary term in the image.

        Args:
            image (ImagePayload): The image to search.
            vocabulary (list[str]): Concept names to look for.
            confidence_threshold (Optional[float]): Pass-through threshold applied
                inside the detector service; None keeps the service default.

        Returns:
            list[Detection]: Zero or more detections per vocabulary term.
        """
        pass
