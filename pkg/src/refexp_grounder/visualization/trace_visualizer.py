"""Implementation of the Graphviz-based pipeline trace observer."""

# Copyright (c) 2025 Linus Held. All rights reserved.

import textwrap
from typing import Optional

from graphviz import Digraph

from ..core.context import GroundingContext
from ..core.types import CandidateSet, Tier
from ..interfaces import PipelineObserver, StageInterface, StageKind


class TraceVisualizer(PipelineObserver):
    """Concrete observer that draws one grounding run as a Graphviz diagram.

    Every executed stage becomes a node carrying a short summary of its output.
    Candidates hang off the refinement stage; the selected candidate is drawn in
    red, and a rejection adds a red terminal node.
    """

    # --- Style Constants ---
    COLOR_SELECTED = "red"
    COLOR_PRIMARY = "black"
    COLOR_OTHER = "gray50"
    COLOR_STAGE_BG = "gray90"
    STYLE_FILLED = "filled"
    STYLE_DASHED = "dashed"
    STAGE_SHAPE = "box"
    CANDIDATE_SHAPE = "note"
    REJECTED_SHAPE = "octagon"
    FONT_SIZE = "9"
    WRAP_WIDTH = 40

    # --- ID Prefixes ---
    PREFIX_STAGE = "stage_"
    PREFIX_CANDIDATE = "cand_"
    CLUSTER_CANDIDATES = "cluster_candidates"
    NODE_REJECTED = "rejected"

    def __init__(self, name: str):
        """Initializes the visualizer with a Graphviz Digraph.

        Args:
            name (str): The name of the resulting diagram (and output filename).
        """
        self.dot = Digraph(name=name)
        self.dot.attr(rankdir="TB", nodesep="0.4", ranksep="0.5")
        self.dot.attr("node", fontsize=self.FONT_SIZE)
        self._last_stage_id: Optional[str] = None
        self._candidates_drawn = False

    def _wrap(self, text: str) -> str:
        return "\n".join(textwrap.wrap(text, self.WRAP_WIDTH)) or "-"

    def _summary(self, stage: StageInterface, context: GroundingContext) -> str:
        kind = getattr(stage, "kind", None)
        if kind == StageKind.CAPTION:
            return self._wrap(context.caption or "")
        if kind == StageKind.CONCEPTS:
            return self._wrap(", ".join(context.concepts or ()))
        if kind == StageKind.DETECTION:
            return f"{len(context.detections or ())} detections"
        if kind == StageKind.REFINEMENT:
            n = len(context.candidate_set) if context.candidate_set else 0
            return f"{n} candidates"
        if kind == StageKind.DESCRIPTION:
            n = len(context.candidate_set.primaries) if context.candidate_set else 0
            return f"{n} described"
        if kind == StageKind.SELECTION and context.trace is not None:
            verdict = "rejected" if context.trace.rejected else f"answer {context.trace.answer}"
            return f"{verdict} ({len(context.trace.steps)} steps, {context.trace.parse_quality.value})"
        return ""

    def _draw_candidates(self, candidate_set: CandidateSet, anchor: str, selected: Optional[int] = None):
        with self.dot.subgraph(name=self.CLUSTER_CANDIDATES) as cluster:
            cluster.attr(label="candidates", style=self.STYLE_DASHED)
            for candidate in candidate_set.candidates:
                node_id = f"{self.PREFIX_CANDIDATE}{candidate.index}"
                color = self.COLOR_SELECTED if candidate.index == selected else (self.COLOR_PRIMARY if candidate.tier == Tier.PRIMARY else self.COLOR_OTHER)
                label = f"#{candidate.index} {candidate.concept}\n{candidate.norm_box.to_text()}"
                if candidate.description:
                    label += "\n" + self._wrap(candidate.description)
                cluster.node(node_id, label=label, shape=self.CANDIDATE_SHAPE, color=color, fontcolor=color)
                if not self._candidates_drawn:
                    self.dot.edge(anchor, node_id, style=self.STYLE_DASHED, color=self.COLOR_OTHER)
        self._candidates_drawn = True

    def on_stage_computed(self, stage: StageInterface, context_in: GroundingContext, context_out: GroundingContext) -> None:
        """Adds the node of a finished stage and, where relevant, the candidate nodes."""
        stage_id = f"{self.PREFIX_STAGE}{stage.name}"
        self.dot.node(stage_id, label=f"{stage.name}\n{self._summary(stage, context_out)}", shape=self.STAGE_SHAPE, style=self.STYLE_FILLED, fillcolor=self.COLOR_STAGE_BG)
        if self._last_stage_id is not None:
            self.dot.edge(self._last_stage_id, stage_id)
        self._last_stage_id = stage_id

        kind = getattr(stage, "kind", None)
        if kind in (StageKind.REFINEMENT, StageKind.DESCRIPTION) and context_out.candidate_set is not None:
            self._draw_candidates(context_out.candidate_set, stage_id)
        if kind == StageKind.SELECTION and context_out.trace is not None:
            if context_out.trace.rejected:
                self.dot.node(self.NODE_REJECTED, label="no match", shape=self.REJECTED_SHAPE, color=self.COLOR_SELECTED, fontcolor=self.COLOR_SELECTED)
                self.dot.edge(stage_id, self.NODE_REJECTED, color=self.COLOR_SELECTED)
            else:
                self._draw_candidates(context_out.candidate_set, stage_id, selected=context_out.trace.answer)
                self.dot.edge(stage_id, f"{self.PREFIX_CANDIDATE}{context_out.trace.answer}", color=self.COLOR_SELECTED)

    def render(self, filename: str, fmt: str = "pdf") -> str:
        """Exports the current graph.

        Args:
            filename (str): The path/name for the exported file (without extension).
            fmt (str): Graphviz output format, e.g. `pdf` or `svg`.

        Returns:
            str: Path of the rendered file.
        """
        return self.dot.render(filename, format=fmt, cleanup=True)
