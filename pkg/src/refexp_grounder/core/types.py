"""Value types produced by the grounding pipeline."""

# Copyright (c) 2025 Linus Held. All rights reserved.

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional

from ..gateway.messages import normalize_concept
from ..geometry import ImageDims, NormalizedBox, PixelBox, normalize


class Tier(str, Enum):
    """Primary candidates are described by the MLLM; others carry coordinates only."""

    PRIMARY = "primary"
    OTHER = "other"


class ParseQuality(str, Enum):
    """How the answer of a reasoning trace was recovered."""

    CLEAN = "clean"
    FALLBACK = "fallback"
    UNPARSEABLE = "unparseable"


class RejectionReason(str, Enum):
    """Why a grounding run produced no box."""

    SELECTOR = "selector"
    EMPTY_CONCEPTS = "empty_concepts"
    EMPTY_CANDIDATES = "empty_candidates"


@dataclass(frozen=True)
class ConceptSet:
    """Ordered, de-duplicated concept names extracted from a query."""

    concepts: tuple[str, ...]

    def __post_init__(self):
        if not self.concepts:
            raise ValueError("A concept set must not be empty.")
        if len(set(self.concepts)) != len(self.concepts):
            raise ValueError(f"Concepts must be unique, got {list(self.concepts)}.")
        for concept in self.concepts:
            if not concept or concept != normalize_concept(concept):
                raise ValueError(f"Concepts must be non-empty, lowercase and trimmed, got '{concept}'.")

    def __iter__(self):
        return iter(self.concepts)

    def __len__(self) -> int:
        return len(self.concepts)


@dataclass(frozen=True)
class Candidate:
    """One refined candidate region.

    Attributes:
        index (int): 1-based position in the selection prompt.
        box (PixelBox): Region in top-left-origin pixels.
        norm_box (NormalizedBox): `normalize(box, dims)`.
        concept (str): Concept the detector attached to the box.
        tier (Tier): PRIMARY or OTHER.
        description (Optional[str]): MLLM description; only primaries carry one,
            and only once the description stage has run.
    """

    index: int
    box: PixelBox
    norm_box: NormalizedBox
    concept: str
    tier: Tier
    description: Optional[str] = None

    def __post_init__(self):
        if self.index < 1:
            raise ValueError(f"Candidate indices are 1-based, got {self.index}.")
        if self.tier == Tier.OTHER and self.description is not None:
            raise ValueError(f"Candidate {self.index} is not primary and cannot carry a description.")

    @classmethod
    def build(cls, index: int, box: PixelBox, dims: ImageDims, concept: str, tier: Tier) -> "Candidate":
        return cls(index, box, normalize(box, dims), concept, tier)

    def with_description(self, description: str) -> "Candidate":
        return replace(self, description=description)

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "box": self.box.to_list(),
            "norm_box": list(self.norm_box.to_tuple()),
            "concept": self.concept,
            "tier": self.tier.value,
            "description": self.description,
        }


@dataclass(frozen=True)
class CandidateSet:
    """Refined candidates of one image, largest first, primaries before others.

    Raises:
        ValueError: If indices are not 1..n, a primary follows an other-tier
            candidate, or the boxes are not ordered by descending area.
    """

    image_dims: ImageDims
    candidates: tuple[Candidate, ...]
    global_caption: str

    def __post_init__(self):
        indices = [c.index for c in self.candidates]
        if indices != list(range(1, len(indices) + 1)):
            raise ValueError(f"Candidate indices must run 1..n, got {indices}.")
        tiers = [c.tier for c in self.candidates]
        if Tier.OTHER in tiers and Tier.PRIMARY in tiers[tiers.index(Tier.OTHER) :]:
            raise ValueError("Primary candidates must precede other-tier candidates.")
        areas = [c.box.area for c in self.candidates]
        if any(later > earlier for earlier, later in zip(areas, areas[1:])):
            raise ValueError("Candidates must be ordered by descending box area.")

    def __len__(self) -> int:
        return len(self.candidates)

    @property
    def primaries(self) -> list[Candidate]:
        return [c for c in self.candidates if c.tier == Tier.PRIMARY]

    @property
    def others(self) -> list[Candidate]:
        return [c for c in self.candidates if c.tier == Tier.OTHER]

    @property
    def is_described(self) -> bool:
        """True when every primary carries a description."""
        return all(c.description is not None for c in self.primaries)

    def by_index(self, index: int) -> Candidate:
        """Resolves a 1-based answer index to its candidate."""
        if not 1 <= index <= len(self.candidates):
            raise IndexError(f"Candidate index {index} outside 1..{len(self.candidates)}.")
        return self.candidates[index - 1]

    def with_descriptions(self, descriptions: dict[int, str]) -> "CandidateSet":
        updated = tuple(c.with_description(descriptions[c.index]) if c.index in descriptions else c for c in self.candidates)
        return replace(self, candidates=updated)

    def to_dict(self) -> dict:
        return {"image_dims": self.image_dims.to_list(), "global_caption": self.global_caption, "candidates": [c.to_dict() for c in self.candidates]}


@dataclass(frozen=True)
class ReasoningTrace:
    """Parsed selection reply.

    Attributes:
        raw_text (str): The model reply the trace was parsed from.
        steps (tuple[str, ...]): Text of each `Reasoning Step <i>:` line.
        answer (Optional[int]): Selected 1-based index, None when rejected or unparseable.
        rejected (bool): True when the reply asserts that no candidate matches.
        parse_quality (ParseQuality): How the answer was recovered.
    """

    raw_text: str
    steps: tuple[str, ...]
    answer: Optional[int]
    rejected: bool
    parse_quality: ParseQuality

    def __post_init__(self):
        if self.answer is not None and self.rejected:
            raise ValueError("A trace cannot both select an index and reject.")
        if self.parse_quality == ParseQuality.UNPARSEABLE and (self.answer is not None or self.rejected):
            raise ValueError("An unparseable trace carries neither an answer nor a rejection.")
        if self.parse_quality != ParseQuality.UNPARSEABLE and self.answer is None and not self.rejected:
            raise ValueError("A parsed trace must carry an answer or a rejection.")

    @classmethod
    def pipeline_rejection(cls) -> "ReasoningTrace":
        """Trace for runs rejected before selection (no concepts or no candidates)."""
        return cls(raw_text="", steps=(), answer=None, rejected=True, parse_quality=ParseQuality.CLEAN)

    def to_dict(self) -> dict:
        return {
            "raw_text": self.raw_text,
            "steps": list(self.steps),
            "answer": self.answer,
            "rejected": self.rejected,
            "parse_quality": self.parse_quality.value,
        }


@dataclass(frozen=True)
class GroundingResult:
    """Outcome of grounding one query; exactly one of `predicted_box` and `rejected` is set."""

    predicted_box: Optional[PixelBox]
    rejected: bool
    trace: ReasoningTrace
    candidate_set: CandidateSet
    rejection_reason: Optional[RejectionReason] = None
    stage_timings: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if (self.predicted_box is None) != self.rejected:
            raise ValueError("A grounding result must carry exactly one of predicted_box and rejected.")
        if self.rejected != (self.rejection_reason is not None):
            raise ValueError("rejection_reason must be set exactly when the result is rejected.")

    @property
    def predicted_norm_box(self) -> Optional[NormalizedBox]:
        if self.predicted_box is None:
            return None
        return normalize(self.predicted_box, self.candidate_set.image_dims)

    def to_dict(self) -> dict:
        return {
            "predicted_box": self.predicted_box.to_list() if self.predicted_box else None,
            "rejected": self.rejected,
            "rejection_reason": self.rejection_reason.value if self.rejection_reason else None,
            "trace": self.trace.to_dict(),
            "candidate_set": self.candidate_set.to_dict(),
            "stage_timings": dict(self.stage_timings),
        }
