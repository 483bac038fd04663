"""Orchestrates grounding runs and coordinates visualization via observers."""

# Copyright (c) 2025 Linus Held. All rights reserved.

import json
import logging
from abc import ABC, abstractmethod
from typing import Optional

import yaml

from .config import RunConfig
from .core import CandidateSet, GroundingContext, GroundingResult, ObservableStage, PipelineBlock, ReasoningTrace, RejectionReason, StageFactory
from .errors import EmptyCandidateSetError, EmptyConceptSetError, StageError
from .gateway import BackendSet, ImagePayload
from .geometry import PixelBox
from .interfaces import PipelineObserver
from .prompts import PromptRenderer
from .visualization import TraceVisualizer

logger = logging.getLogger(__name__)

_PIPELINE_REJECTIONS = {EmptyConceptSetError: RejectionReason.EMPTY_CONCEPTS, EmptyCandidateSetError: RejectionReason.EMPTY_CANDIDATES}


class SystemBase(ABC):
    """Abstract base class for a grounding system.

    It owns the stage layout, runs it over (image, query) pairs, turns the final
    context into a one-hot GroundingResult and handles layout export.
    """

    def __init__(self, name: str, config: RunConfig, renderer: Optional[PromptRenderer] = None):
        """Initializes the system orchestrator.

        Args:
            name (str): The descriptive name of the system.
            config (RunConfig): Validated run configuration.
            renderer (Optional[PromptRenderer]): Prompt renderer; built from
                `config.prompts.template_dir` when omitted.
        """
        self.name = name
        self.config = config
        self.renderer = renderer or PromptRenderer.for_template_dir(config.prompts.template_dir)
        self.system_layout: Optional[PipelineBlock] = None
        self.configure_system()

    @abstractmethod
    def configure_system(self):
        """Abstract method to define the stage layout.

        Must be implemented by subclasses to set `self.system_layout`.
        """
        pass

    def _execute(self, context: GroundingContext, observers: list[PipelineObserver]) -> GroundingResult:
        if not self.system_layout:
            raise ValueError("System layout is not configured.")

        runner = ObservableStage(self.system_layout)
        for observer in observers:
            runner.attach(observer)

        try:
            final = runner.run(context)
        except StageError as exc:
            reason = _PIPELINE_REJECTIONS.get(type(exc.cause))
            if reason is None:
                raise
            logger.info("Rejected before selection: %s", exc)
            failed = exc.context if exc.context is not None else context
            empty = CandidateSet(context.image.dims, (), failed.caption or "")
            return GroundingResult(None, True, ReasoningTrace.pipeline_rejection(), empty, reason, dict(failed.stage_timings))

        final.require("candidate_set", "trace")
        if final.trace.rejected:
            return GroundingResult(None, True, final.trace, final.candidate_set, RejectionReason.SELECTOR, dict(final.stage_timings))
        predicted = final.candidate_set.by_index(final.trace.answer).box
        return GroundingResult(predicted, False, final.trace, final.candidate_set, None, dict(final.stage_timings))

    def ground(self, image: ImagePayload, query: str, backends: BackendSet, reference_box: Optional[PixelBox] = None) -> GroundingResult:
        """Grounds a referring expression in an image.

        Args:
            image (ImagePayload): The image.
            query (str): The referring expression.
            backends (BackendSet): Model roles bound to this image.
            reference_box (Optional[PixelBox]): Ground-truth box for query
                substitution ablations.

        Returns:
            GroundingResult: Exactly one of a predicted box or a rejection.

        Raises:
            ValueError: If the layout is not configured or the query is empty.
            StageError: If a stage fails for a reason other than an empty
                concept or candidate set.
        """
        if not query.strip():
            raise ValueError("Query must not be empty.")
        context = GroundingContext(image=image, query=query, backends=backends, reference_box=reference_box)
        return self._execute(context, [])

    def generate_graph(
        self,
        image: ImagePayload,
        query: str,
        backends: BackendSet,
        filename: Optional[str] = None,
        fmt: str = "pdf",
        reference_box: Optional[PixelBox] = None,
    ) -> GroundingResult:
        """Grounds a query while drawing the run with a TraceVisualizer.

        Args:
            filename (Optional[str]): Output path without extension. Defaults to
                "trace_<system_name>".
            fmt (str): Graphviz output format.

        Returns:
            GroundingResult: The result of the run.
        """
        if filename is None:
            filename = f"trace_{self.name}"
        visualizer = TraceVisualizer(self.name)
        context = GroundingContext(image=image, query=query, backends=backends, reference_box=reference_box)
        result = self._execute(context, [visualizer])
        visualizer.render(filename, fmt)
        return result

    def save_layout_yaml(self, file_path: str):
        """Exports the current stage layout to a YAML file.

        Args:
            file_path (str): The destination path for the YAML file.
        """
        with open(file_path, "w") as f:
            yaml.safe_dump(self.system_layout.to_dict(), f, default_flow_style=False, sort_keys=False)

    def load_layout_yaml(self, file_path: str):
        """Loads a stage layout from a YAML file.

        Args:
            file_path (str): The path to the layout file.
        """
        with open(file_path, "r") as f:
            data = yaml.safe_load(f)
        self.system_layout = self._layout_from_dict(data)

    def save_layout_json(self, file_path: str):
        """Exports the current stage layout to a JSON file.

        Args:
            file_path (str): The destination path for the JSON file.
        """
        with open(file_path, "w") as f:
            json.dump(self.system_layout.to_dict(), f, indent=4)

    def load_layout_json(self, file_path: str):
        """Loads a stage layout from a JSON file.

        Args:
            file_path (str): The path to the layout file.
        """
        with open(file_path, "r") as f:
            data = json.load(f)
        self.system_layout = self._layout_from_dict(data)

    def _layout_from_dict(self, data: dict) -> PipelineBlock:
        layout = StageFactory.from_dict(data, self.renderer)
        if not isinstance(layout, PipelineBlock):
            layout = PipelineBlock(self.name, [layout], self.config.record_timings)
        return layout
