import pytest

from refexp_grounder.core import Candidate, CandidateSet, ConceptSet, GroundingResult, ParseQuality, ReasoningTrace, RejectionReason, Tier
from refexp_grounder.geometry import ImageDims, PixelBox

DIMS = ImageDims(320, 240)


def candidate(index, box, tier=Tier.PRIMARY, concept="chair"):
    return Candidate.build(index, PixelBox(*box), DIMS, concept, tier)


@pytest.fixture
def candidate_set():
    return CandidateSet(
        DIMS,
        (candidate(1, (0, 0, 100, 100)), candidate(2, (150, 0, 230, 80)), candidate(3, (0, 150, 60, 210), Tier.OTHER, "dog")),
        "A room.",
    )


# --- ConceptSet ---


def test_concept_set_validation():
    assert list(ConceptSet(("kid", "child"))) == ["kid", "child"]
    with pytest.raises(ValueError, match="must not be empty"):
        ConceptSet(())
    with pytest.raises(ValueError, match="unique"):
        ConceptSet(("kid", "kid"))
    with pytest.raises(ValueError, match="lowercase"):
        ConceptSet(("Kid",))


# --- Candidates ---


def test_candidate_carries_normalized_box():
    c = candidate(1, (80, 60, 240, 180))
    assert c.norm_box.to_tuple() == (0.5, 0.5, 0.5, 0.5)
    assert c.description is None


def test_other_tier_cannot_carry_description():
    with pytest.raises(ValueError, match="cannot carry a description"):
        candidate(1, (0, 0, 10, 10), Tier.OTHER).with_description("a chair")
    with pytest.raises(ValueError, match="1-based"):
        candidate(0, (0, 0, 10, 10))


def test_candidate_set_tiers_and_lookup(candidate_set):
    assert [c.index for c in candidate_set.primaries] == [1, 2]
    assert [c.index for c in candidate_set.others] == [3]
    assert candidate_set.by_index(3).concept == "dog"
    with pytest.raises(IndexError):
        candidate_set.by_index(4)


def test_descriptions_complete_the_set(candidate_set):
    assert not candidate_set.is_described
    described = candidate_set.with_descriptions({1: "a red chair", 2: "a blue chair"})
    assert described.is_described
    assert described.by_index(2).description == "a blue chair"
    assert candidate_set.by_index(2).description is None


@pytest.mark.parametrize(
    "candidates, message",
    [
        ((candidate(2, (0, 0, 100, 100)),), "run 1..n"),
        ((candidate(1, (0, 0, 100, 100), Tier.OTHER), candidate(2, (0, 0, 50, 50))), "precede"),
        ((candidate(1, (0, 0, 50, 50)), candidate(2, (0, 0, 100, 100))), "descending box area"),
    ],
)
def test_candidate_set_invariants(candidates, message):
    with pytest.raises(ValueError, match=message):
        CandidateSet(DIMS, candidates, "")


# --- Traces and results ---


def test_trace_invariants():
    with pytest.raises(ValueError, match="both select"):
        ReasoningTrace("", (), 1, True, ParseQuality.CLEAN)
    with pytest.raises(ValueError, match="neither an answer"):
        ReasoningTrace("", (), 1, False, ParseQuality.UNPARSEABLE)
    with pytest.raises(ValueError, match="must carry an answer"):
        ReasoningTrace("", (), None, False, ParseQuality.FALLBACK)
    assert ReasoningTrace.pipeline_rejection().rejected


def test_result_requires_box_xor_rejection(candidate_set):
    trace = ReasoningTrace("Answer: 1", (), 1, False, ParseQuality.CLEAN)
    result = GroundingResult(PixelBox(0, 0, 100, 100), False, trace, candidate_set)
    assert result.predicted_norm_box.to_tuple() == (0.156, 0.792, 0.313, 0.417)

    with pytest.raises(ValueError, match="exactly one"):
        GroundingResult(None, False, trace, candidate_set)
    with pytest.raises(ValueError, match="rejection_reason"):
        GroundingResult(None, True, ReasoningTrace.pipeline_rejection(), candidate_set)

    rejected = GroundingResult(None, True, ReasoningTrace.pipeline_rejection(), candidate_set, RejectionReason.EMPTY_CANDIDATES)
    assert rejected.predicted_norm_box is None
    assert rejected.to_dict()["rejection_reason"] == "empty_candidates"
