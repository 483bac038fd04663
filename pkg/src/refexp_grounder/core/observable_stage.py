"""Implements the observable wrapper around pipeline stages."""

# Copyright (c) 2025 Linus Held. All rights reserved.

from ..interfaces import ObservableInterface, PipelineObserver, StageInterface
from .context import GroundingContext
from .pipeline_block import PipelineBlock


class ObservableStage(ObservableInterface):
    """A wrapper class that encapsulates a stage and reports every stage run to its observers.

    When the wrapped stage is a PipelineBlock, observers are notified after each
    of its sub-stages rather than once for the whole block.
    """

    def __init__(self, stage: StageInterface):
        """Initializes the observable wrapper.

        Args:
            stage (StageInterface): The stage or pipeline to be wrapped.
        """
        self.stage = stage
        self._observers = []

    def attach(self, observer: PipelineObserver):
        if observer not in self._observers:
            self._observers.append(observer)

    def detach(self, observer: PipelineObserver):
        if observer in self._observers:
            self._observers.remove(observer)

    def run(self, context: GroundingContext) -> GroundingContext:
        """Executes the wrapped stage and notifies observers.

        Args:
            context (GroundingContext): The input context.

        Returns:
            GroundingContext: The context returned by the wrapped stage.
        """
        if not isinstance(self.stage, PipelineBlock):
            result = self.stage.run(context)
            self.notify(self.stage, context, result)
            return result

        current = context
        for sub_stage in self.stage.stages:
            result = self.stage.run_stage(sub_stage, current)
            self.notify(sub_stage, current, result)
            current = result
        return current

    def notify(self, stage: StageInterface, context_in: GroundingContext, context_out: GroundingContext):
        """Broadcasts one finished stage run to all registered observers."""
        for observer in self._observers:
            observer.on_stage_computed(stage, context_in, context_out)
