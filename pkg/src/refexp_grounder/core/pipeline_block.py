"""Executes a sequence of stages over the grounding context."""

# Copyright (c) 2025 Linus Held. All rights reserved.

import logging
import time

from ..errors import GroundingError, StageError
from ..interfaces import StageInterface
from .context import GroundingContext

logger = logging.getLogger(__name__)


class PipelineBlock(StageInterface):
    """Runs stages in strict order; the output context of one stage is the input of the next.

    Failures raised as `GroundingError` inside a stage are re-raised as
    `StageError` carrying the stage name.
    """

    def __init__(self, name: str, stages: list[StageInterface], record_timings: bool = True):
        """Initializes the PipelineBlock with a sequence of stages.

        Args:
            name (str): The descriptive name of the pipeline.
            stages (list[StageInterface]): Stages executed in list order.
            record_timings (bool): Store each stage's wall-clock duration in the context.
        """
        self.pipeline_name = name
        self.stages = stages
        self.record_timings = record_timings

    @property
    def name(self) -> str:
        return self.pipeline_name

    def run_stage(self, stage: StageInterface, context: GroundingContext) -> GroundingContext:
        """Runs one stage with error tagging and optional timing."""
        start = time.perf_counter()
        try:
            result = stage.run(context)
        except StageError as exc:
            if exc.context is None:
                exc.context = context
            raise
        except GroundingError as exc:
            error = StageError(stage.name, exc)
            error.context = context
            raise error from exc
        elapsed = time.perf_counter() - start
        logger.debug("Stage %s finished in %.3fs", stage.name, elapsed)
        return result.with_timing(stage.name, elapsed) if self.record_timings else result

    def run(self, context: GroundingContext) -> GroundingContext:
        current = context
        for stage in self.stages:
            current = self.run_stage(stage, current)
        return current

    def to_dict(self) -> dict:
        """Serializes the PipelineBlock into a dictionary for layout export.

        Returns:
            dict: The block type, its name, the timing flag and all stage layouts.
        """
        return {"type": "PipelineBlock", "name": self.pipeline_name, "record_timings": self.record_timings, "stages": [stage.to_dict() for stage in self.stages]}
