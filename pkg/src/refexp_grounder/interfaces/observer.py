"""Defines the abstract observer interface for pipeline tracing."""

# Copyright (c) 2025 Linus Held. All rights reserved.

from abc import ABC, abstractmethod
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from ..core.context import GroundingContext
    from .stage_interface import StageInterface


class PipelineObserver(ABC):
    """Abstract base class for all observers of the grounding pipeline.

    Separates the grounding logic from tracing, reporting or visualization,
    implementing the Observer design pattern.
    """

    @abstractmethod
    def on_stage_computed(self, stage: "StageInterface", context_in: "GroundingContext", context_out: "GroundingContext") -> None:
        """Triggered after a stage has transformed the grounding context.

        Args:
            stage (StageInterface): The stage that has just run.
            context_in (GroundingContext): The context the stage received.
            context_out (GroundingContext): The context the stage returned.
        """
        pass
