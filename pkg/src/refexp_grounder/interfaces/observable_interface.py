"""Defines the contract for observable components of the pipeline."""

# Copyright (c) 2025 Linus Held. All rights reserved.

from abc import ABC, abstractmethod
from typing import TYPE_CHECKING

from .observer import PipelineObserver

if TYPE_CHECKING:
    from ..core.context import GroundingContext
    from .stage_interface import StageInterface


class ObservableInterface(ABC):
    """Abstract interface for objects that can be monitored by a PipelineObserver."""

    @abstractmethod
    def attach(self, observer: PipelineObserver):
        """Registers a listener (observer) to receive notifications after each stage run.

        Args:
            observer (PipelineObserver): The observer instance to be registered.
        """
        pass

    @abstractmethod
    def notify(self, stage: "StageInterface", context_in: "GroundingContext", context_out: "GroundingContext"):
        """Broadcasts a finished stage run to all registered observers.

        Args:
            stage (StageInterface): The stage that has just run.
            context_in (GroundingContext): Context before the stage ran.
            context_out (GroundingContext): Context after the stage ran.
        """
        pass
