import pytest

from refexp_grounder.core import (
    Tier,
    collect_detections,
    describe_candidate,
    describe_with_self_consistency,
    extract_concepts,
    generate_global_caption,
    parse_concepts,
    refine_candidates,
    select_candidate,
    selection_entries,
)
from refexp_grounder.errors import EmptyCandidateSetError, EmptyCaptionError, EmptyConceptSetError, SelectionError, StageError
from refexp_grounder.gateway import Detection, OracleDetector, Role, ScriptedBackend
from refexp_grounder.geometry import ImageDims, PixelBox
from refexp_grounder.prompts import PromptRenderer

renderer = PromptRenderer()
DIMS = ImageDims(320, 240)


def grid_detections():
    """Twelve disjoint boxes of distinct area on a 640x480 image, smallest first."""
    detections = []
    for k in range(12):
        row, column = divmod(k, 4)
        x, y = column * 160, row * 160
        detections.append(Detection("chair", PixelBox(x, y, x + 100 + 4 * k, y + 100)))
    return detections


# --- Caption and concepts ---


def test_caption_is_stripped(two_chairs, scene_image):
    mllm = ScriptedBackend(["  A synthetic scene.  \n"], role_kind="mllm")
    assert generate_global_caption(scene_image(two_chairs), mllm, renderer) == "A synthetic scene."
    assert mllm.calls[0][0].image is not None


def test_blank_caption_is_an_error(two_chairs, scene_image):
    with pytest.raises(EmptyCaptionError):
        generate_global_caption(scene_image(two_chairs), ScriptedBackend([" \n "], role_kind="mllm"), renderer)


def test_parse_concepts_normalizes_and_deduplicates():
    assert parse_concepts("Kid, child,, person.\nshirt, kid") == ["kid", "child", "person", "shirt"]
    assert parse_concepts(" , . ,") == []


def test_extract_concepts_builds_concept_set():
    llm = ScriptedBackend(["red, Chair, seat"])
    concepts = extract_concepts("the red chair", "A room.", llm, renderer, ["chair"])
    assert concepts.concepts == ("red", "chair", "seat")
    assert llm.calls[0][1].text == "Image description: A room.\nQuery: the red chair\n"


def test_extract_concepts_rejects_empty_reply():
    with pytest.raises(EmptyConceptSetError, match="the red chair"):
        extract_concepts("the red chair", "A room.", ScriptedBackend(["  "]), renderer)


# --- Detection and refinement ---


def test_detections_follow_concept_order(two_chairs, scene_image):
    detections = collect_detections(scene_image(two_chairs), ["dog", "red", "chair"], OracleDetector(two_chairs))
    assert [d.concept for d in detections] == ["dog", "chair", "chair"]


def test_area_filter_boundary_is_inclusive():
    detections = [Detection("cup", PixelBox(0, 0, 48, 40)), Detection("cup", PixelBox(100, 100, 147, 140))]
    candidate_set = refine_candidates(detections, DIMS, "A table.")
    assert [c.box for c in candidate_set.candidates] == [PixelBox(0, 0, 48, 40)]


def test_refinement_keeps_ten_primaries_of_twelve():
    candidate_set = refine_candidates(grid_detections(), ImageDims(640, 480), "A grid.")
    assert len(candidate_set) == 12
    assert [c.tier for c in candidate_set.candidates] == [Tier.PRIMARY] * 10 + [Tier.OTHER] * 2
    assert candidate_set.by_index(1).box.width == 144
    assert candidate_set.by_index(12).box.width == 100


def test_duplicate_boxes_keep_the_first_concept(two_chairs, scene_image):
    detections = collect_detections(scene_image(two_chairs), ["chair", "seat"], OracleDetector(two_chairs))
    candidate_set = refine_candidates(detections, two_chairs.dims, two_chairs.caption)
    assert [(c.index, c.concept, c.box) for c in candidate_set.candidates] == [
        (1, "chair", two_chairs.object_by_id("obj0").pixel_box),
        (2, "chair", two_chairs.object_by_id("obj1").pixel_box),
    ]


def test_nothing_survives_refinement():
    with pytest.raises(EmptyCandidateSetError):
        refine_candidates([Detection("cup", PixelBox(0, 0, 10, 10))], DIMS, "")
    with pytest.raises(EmptyCandidateSetError):
        refine_candidates([], DIMS, "")


def test_max_primary_must_be_positive():
    with pytest.raises(ValueError, match="max_primary"):
        refine_candidates(grid_detections(), ImageDims(640, 480), "", max_primary=0)


# --- Description ---


@pytest.fixture
def chair_candidates(two_chairs):
    detections = [Detection("chair", two_chairs.object_by_id(oid).pixel_box) for oid in ("obj0", "obj1")]
    return refine_candidates(detections, two_chairs.dims, two_chairs.caption, max_primary=1)


def test_description_uses_the_marked_image(two_chairs, scene_image, chair_candidates):
    image = scene_image(two_chairs)
    mllm = ScriptedBackend([" a red chair "], role_kind="mllm")
    text = describe_candidate(image, chair_candidates.by_index(1), mllm, renderer)

    system, user = mllm.calls[0]
    assert text == "a red chair"
    assert system.role == Role.SYSTEM
    assert user.image.dims == image.dims
    assert user.image.data != image.data
    assert "chair[0.156, 0.771, 0.250, 0.375]" in user.text


def test_only_primaries_are_described(two_chairs, scene_image, chair_candidates):
    with pytest.raises(ValueError, match="Only primary"):
        describe_candidate(scene_image(two_chairs), chair_candidates.by_index(2), ScriptedBackend([]), renderer)


def test_description_failure_names_the_candidate(two_chairs, scene_image, chair_candidates):
    with pytest.raises(StageError) as excinfo:
        describe_candidate(scene_image(two_chairs), chair_candidates.by_index(1), ScriptedBackend([], role_kind="mllm"), renderer)
    assert excinfo.value.stage == "description"
    assert excinfo.value.candidate_index == 1


def test_self_consistency_aggregates_samples(two_chairs, scene_image, chair_candidates):
    mllm = ScriptedBackend(["a red chair", "a pink chair", "a red chair"], role_kind="mllm")
    llm = ScriptedBackend(["a red chair"])
    text = describe_with_self_consistency(scene_image(two_chairs), chair_candidates.by_index(1), 3, mllm, llm, renderer)

    assert text == "a red chair"
    assert len(mllm.calls) == 3
    assert llm.calls[0][-1].text == "Descriptions:\n1. a red chair\n2. a pink chair\n3. a red chair\n"


def test_single_sample_skips_aggregation(two_chairs, scene_image, chair_candidates):
    text = describe_with_self_consistency(scene_image(two_chairs), chair_candidates.by_index(1), 1, ScriptedBackend(["a red chair"], "mllm"), ScriptedBackend([]), renderer)
    assert text == "a red chair"
    with pytest.raises(ValueError, match="n must be at least 1"):
        describe_with_self_consistency(scene_image(two_chairs), chair_candidates.by_index(1), 0, ScriptedBackend([]), ScriptedBackend([]), renderer)


# --- Selection ---


@pytest.fixture
def described(chair_candidates):
    return chair_candidates.with_descriptions({1: "a red chair"})


def test_selection_entries_split_tiers(described):
    main, other = selection_entries(described)
    assert [(e.index, e.description) for e in main] == [(1, "a red chair")]
    assert [(e.index, e.concept) for e in other] == [(2, "chair")]


def test_selection_requires_descriptions(chair_candidates):
    with pytest.raises(ValueError, match="needs a description"):
        selection_entries(chair_candidates)


def test_selection_sends_all_candidates_in_one_request(described):
    llm = ScriptedBackend(["Reasoning Step 1: The red one.\nAnswer: 1"])
    trace = select_candidate("the red chair", described, llm, renderer)
    assert trace.answer == 1
    assert len(llm.calls) == 1
    assert llm.calls[0][1].text == "the red chair"


def test_unparseable_reply_is_reprompted(described):
    llm = ScriptedBackend(["I am not sure.", "Answer: 2"])
    trace = select_candidate("the blue chair", described, llm, renderer)

    assert trace.answer == 2
    second = llm.calls[1]
    assert [m.role for m in second] == [Role.SYSTEM, Role.USER, Role.ASSISTANT, Role.USER]
    assert second[2].text == "I am not sure."
    assert second[3].text == renderer.render_reprompt()


def test_selection_gives_up_after_reprompts(described):
    with pytest.raises(SelectionError, match="after 1 re-prompt"):
        select_candidate("q", described, ScriptedBackend(["hmm", "still unsure"]), renderer)
    with pytest.raises(SelectionError, match="after 0 re-prompt"):
        select_candidate("q", described, ScriptedBackend(["hmm"]), renderer, max_reprompts=0)
