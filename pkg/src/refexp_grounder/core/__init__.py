"""Exposes the grounding pipeline: types, operations and stages."""

# Copyright (c) 2025 Linus Held. All rights reserved.

from .caption_stage import CaptionStage
from .concept_stage import ConceptStage
from .context import GroundingContext
from .description_stage import SUBSTITUTION_MODES, DescriptionStage
from .detection_stage import DetectionStage
from .observable_stage import ObservableStage
from .operations import (
    DEFAULT_MAX_PRIMARY,
    collect_detections,
    describe_candidate,
    describe_with_self_consistency,
    extract_concepts,
    generate_candidates,
    generate_global_caption,
    parse_concepts,
    refine_candidates,
    select_candidate,
    selection_entries,
)
from .pipeline_block import PipelineBlock
from .refinement_stage import RefinementStage
from .selection_stage import SelectionStage
from .stage_factory import StageFactory
from .trace_parser import DEFAULT_REJECTION_TOKENS, parse_reasoning_trace
from .types import Candidate, CandidateSet, ConceptSet, GroundingResult, ParseQuality, ReasoningTrace, RejectionReason, Tier

__all__ = [
    "DEFAULT_MAX_PRIMARY",
    "DEFAULT_REJECTION_TOKENS",
    "SUBSTITUTION_MODES",
    "Candidate",
    "CandidateSet",
    "CaptionStage",
    "ConceptSet",
    "ConceptStage",
    "DescriptionStage",
    "DetectionStage",
    "GroundingContext",
    "GroundingResult",
    "ObservableStage",
    "ParseQuality",
    "PipelineBlock",
    "ReasoningTrace",
    "RefinementStage",
    "RejectionReason",
    "SelectionStage",
    "StageFactory",
    "Tier",
    "collect_detections",
    "describe_candidate",
    "describe_with_self_consistency",
    "extract_concepts",
    "generate_candidates",
    "generate_global_caption",
    "parse_concepts",
    "parse_reasoning_trace",
    "refine_candidates",
    "select_candidate",
    "selection_entries",
]
