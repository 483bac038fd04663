"""Defines the contract for all stages of the grounding pipeline."""

# Copyright (c) 2025 Linus Held. All rights reserved.

from abc import ABC, abstractmethod
from typing import TYPE_CHECKING

from .stage_kind import StageKind

if TYPE_CHECKING:
    from ..core.context import GroundingContext


class StageInterface(ABC):
    """Abstract interface defining the mandatory structure for all pipeline stages.

    A stage reads what it needs from the incoming context and returns an updated
    copy. It never mutates its input, so stages can be chained, observed and
    re-run freely.
    """

    kind: StageKind

    @property
    def name(self) -> str:
        return self.kind.value

    @abstractmethod
    def run(self, context: "GroundingContext") -> "GroundingContext":
        """Transforms the grounding context according to the stage's logic.

        Args:
            context (GroundingContext): State accumulated by the previous stages.

        Returns:
            GroundingContext: A new context carrying this stage's output.
        """
        pass

    @abstractmethod
    def to_dict(self) -> dict:
        """
        Creates a serializable dictionary describing the stage

        Returns:
            dict: the created dictionary, understood by the StageFactory
        """
        pass
