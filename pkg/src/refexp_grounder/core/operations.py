"""The grounding operations, one per pipeline step.

Stages call these functions; they are also usable on their own with any
backend trio.
"""

# Copyright (c) 2025 Linus Held. All rights reserved.

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Iterable, Optional

from ..errors import EmptyCandidateSetError, EmptyCaptionError, EmptyConceptSetError, GatewayError, SelectionError, StageError
from ..gateway.client import detect, llm_complete, mllm_complete
from ..gateway.messages import ChatMessage, Detection, ImagePayload, normalize_concept
from ..geometry import DEFAULT_MIN_AREA_FRACTION, DEFAULT_NMS_IOU, ImageDims, filter_by_area, nms_indices
from ..interfaces import ChatBackend, DetectorBackend, StageKind
from ..prompts import DEFAULT_BOX_FORMAT_LABEL, DEFAULT_VISUAL_PROMPT_NAME, MainEntry, OtherEntry, PromptRenderer, VisualPromptSpec, render_visual_prompt_image
from .trace_parser import DEFAULT_REJECTION_TOKENS, parse_reasoning_trace
from .types import Candidate, CandidateSet, ConceptSet, ParseQuality, ReasoningTrace, Tier

logger = logging.getLogger(__name__)

DEFAULT_MAX_PRIMARY = 10

_TRAILING_PUNCTUATION = ".;:!?\"'`*"


def generate_global_caption(image: ImagePayload, mllm: ChatBackend, renderer: PromptRenderer) -> str:
    """Asks the MLLM for a global description of the image.

    Raises:
        EmptyCaptionError: If the model returns only whitespace.
    """
    bundle = renderer.render_global_caption_prompt(image)
    caption = mllm_complete(mllm, bundle.to_messages()).strip()
    if not caption:
        raise EmptyCaptionError("The captioning model returned an empty description.")
    return caption


def parse_concepts(reply: str) -> list[str]:
    """Splits a comma-separated extractor reply into normalized unique concepts."""
    concepts = []
    for token in reply.replace("\n", ",").split(","):
        concept = normalize_concept(token.strip().strip(_TRAILING_PUNCTUATION))
        if concept and concept not in concepts:
            concepts.append(concept)
    return concepts


def extract_concepts(
    query: str,
    caption: str,
    llm: ChatBackend,
    renderer: PromptRenderer,
    noun_examples: Optional[list[str]] = None,
    use_caption: bool = True,
) -> ConceptSet:
    """Infers the candidate target concepts of a query.

    Raises:
        EmptyConceptSetError: If the reply contains no usable concept.
    """
    bundle = renderer.render_concept_extraction(query, caption, noun_examples, use_caption=use_caption)
    reply = llm_complete(llm, bundle.to_messages())
    concepts = parse_concepts(reply)
    if not concepts:
        raise EmptyConceptSetError(f"No concept could be extracted for query '{query}'.")
    logger.info("Extracted %d concept(s): %s", len(concepts), ", ".join(concepts))
    return ConceptSet(tuple(concepts))


def collect_detections(
    image: ImagePayload,
    concepts: Iterable[str],
    detector: DetectorBackend,
    confidence_threshold: Optional[float] = None,
    max_workers: int = 4,
) -> list[Detection]:
    """Runs the detector once per concept and returns the union in concept order."""
    concepts = list(concepts)
    with ThreadPoolExecutor(max_workers=max(1, min(max_workers, len(concepts)))) as pool:
        per_concept = list(pool.map(lambda concept: detect(detector, image, [concept], confidence_threshold), concepts))
    detections = [detection for batch in per_concept for detection in batch]
    logger.info("Detector returned %d box(es) for %d concept(s)", len(detections), len(concepts))
    return detections


def refine_candidates(
    detections: list[Detection],
    dims: ImageDims,
    global_caption: str,
    min_area_fraction: float = DEFAULT_MIN_AREA_FRACTION,
    nms_iou: float = DEFAULT_NMS_IOU,
    max_primary: int = DEFAULT_MAX_PRIMARY,
) -> CandidateSet:
    """Filters, de-duplicates, ranks and splits detections into candidates.

    The order is fixed: area filter, area-priority NMS, descending-area sort,
    then the `max_primary` largest become primary. Indices run 1..n.

    Raises:
        EmptyCandidateSetError: If no box survives.
    """
    if max_primary < 1:
        raise ValueError(f"max_primary must be at least 1, got {max_primary}.")
    kept_boxes = set(filter_by_area([d.box for d in detections], dims, min_area_fraction))
    survivors = [d for d in detections if d.box in kept_boxes]
    ranked = [survivors[i] for i in nms_indices([d.box for d in survivors], nms_iou)]
    if not ranked:
        raise EmptyCandidateSetError(f"None of {len(detections)} detection(s) survived refinement.")

    candidates = tuple(
        Candidate.build(position, d.box, dims, d.concept, Tier.PRIMARY if position <= max_primary else Tier.OTHER) for position, d in enumerate(ranked, start=1)
    )
    logger.info("Refined %d detection(s) into %d candidate(s)", len(detections), len(candidates))
    return CandidateSet(dims, candidates, global_caption)


def generate_candidates(
    image: ImagePayload,
    concepts: ConceptSet,
    detector: DetectorBackend,
    global_caption: str,
    min_area_fraction: float = DEFAULT_MIN_AREA_FRACTION,
    nms_iou: float = DEFAULT_NMS_IOU,
    max_primary: int = DEFAULT_MAX_PRIMARY,
    confidence_threshold: Optional[float] = None,
    max_workers: int = 4,
) -> CandidateSet:
    """Detects every concept and refines the union into a candidate set."""
    detections = collect_detections(image, concepts, detector, confidence_threshold, max_workers)
    return refine_candidates(detections, image.dims, global_caption, min_area_fraction, nms_iou, max_primary)


def describe_candidate(
    image: ImagePayload,
    candidate: Candidate,
    mllm: ChatBackend,
    renderer: PromptRenderer,
    visual_prompt: VisualPromptSpec = VisualPromptSpec(),
    visual_prompt_name: str = DEFAULT_VISUAL_PROMPT_NAME,
    box_format_label: str = DEFAULT_BOX_FORMAT_LABEL,
    sample_index: int = 0,
) -> str:
    """Describes one primary candidate from its visual-prompt image.

    Raises:
        ValueError: If the candidate is not primary.
        StageError: If the model call fails; tagged with the candidate index.
    """
    if candidate.tier != Tier.PRIMARY:
        raise ValueError(f"Only primary candidates are described, candidate {candidate.index} is {candidate.tier.value}.")
    marked = render_visual_prompt_image(image, candidate.box, visual_prompt)
    bundle = renderer.render_instance_description_prompt(candidate.concept, candidate.norm_box, box_format_label, visual_prompt_name, image=marked)
    try:
        return mllm_complete(mllm, bundle.to_messages(), sample_index=sample_index).strip()
    except GatewayError as exc:
        raise StageError(StageKind.DESCRIPTION.value, exc, candidate.index) from exc


def describe_with_self_consistency(
    image: ImagePayload,
    candidate: Candidate,
    n: int,
    mllm: ChatBackend,
    llm: ChatBackend,
    renderer: PromptRenderer,
    visual_prompt: VisualPromptSpec = VisualPromptSpec(),
    visual_prompt_name: str = DEFAULT_VISUAL_PROMPT_NAME,
    box_format_label: str = DEFAULT_BOX_FORMAT_LABEL,
) -> str:
    """Samples `n` descriptions and lets the LLM consolidate them.

    With n == 1 the single description is returned without an aggregation call.

    Raises:
        ValueError: If n is below 1.
        StageError: If a sampling or the aggregation call fails.
    """
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}.")
    samples = [describe_candidate(image, candidate, mllm, renderer, visual_prompt, visual_prompt_name, box_format_label, sample_index=i) for i in range(n)]
    if n == 1:
        return samples[0]
    bundle = renderer.render_aggregation_prompt(samples)
    try:
        return llm_complete(llm, bundle.to_messages()).strip()
    except GatewayError as exc:
        raise StageError(StageKind.DESCRIPTION.value, exc, candidate.index) from exc


def selection_entries(candidate_set: CandidateSet) -> tuple[list[MainEntry], list[OtherEntry]]:
    """Builds the prompt lines of a described candidate set.

    Raises:
        ValueError: If a primary candidate has no description yet.
    """
    if not candidate_set.is_described:
        raise ValueError("Every primary candidate needs a description before selection.")
    main = [MainEntry(c.index, c.concept, c.norm_box, c.description) for c in candidate_set.primaries]
    other = [OtherEntry(c.index, c.concept, c.norm_box) for c in candidate_set.others]
    return main, other


def select_candidate(
    query: str,
    candidate_set: CandidateSet,
    llm: ChatBackend,
    renderer: PromptRenderer,
    rejection_tokens: Iterable[str] = DEFAULT_REJECTION_TOKENS,
    max_reprompts: int = 1,
    box_format_label: str = DEFAULT_BOX_FORMAT_LABEL,
) -> ReasoningTrace:
    """Asks the LLM to pick the referred candidate, or to reject all of them.

    All candidates are presented in one request; the reply names a single index.
    Unparseable replies are re-prompted up to `max_reprompts` times.

    Raises:
        ValueError: If the candidate set is empty.
        SelectionError: If the reply stays unparseable.
    """
    if not len(candidate_set):
        raise ValueError("Selection needs at least one candidate.")
    rejection_tokens = list(rejection_tokens)
    main, other = selection_entries(candidate_set)
    messages = renderer.render_selection_prompt(query, candidate_set.global_caption, main, other, box_format_label).to_messages()

    reply = llm_complete(llm, messages)
    trace = parse_reasoning_trace(reply, len(candidate_set), rejection_tokens)
    attempts = 0
    while trace.parse_quality == ParseQuality.UNPARSEABLE and attempts < max_reprompts:
        attempts += 1
        logger.warning("Unparseable selection reply; re-prompting (%d/%d)", attempts, max_reprompts)
        messages = messages + [ChatMessage.assistant(reply), ChatMessage.user(renderer.render_reprompt())]
        reply = llm_complete(llm, messages)
        trace = parse_reasoning_trace(reply, len(candidate_set), rejection_tokens)

    if trace.parse_quality == ParseQuality.UNPARSEABLE:
        raise SelectionError(f"Selection reply stayed unparseable after {attempts} re-prompt(s): {reply[:200]!r}")
    return trace
