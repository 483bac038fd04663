import pytest

from refexp_grounder.core import ParseQuality, parse_reasoning_trace

CLEAN, FALLBACK, UNPARSEABLE = ParseQuality.CLEAN, ParseQuality.FALLBACK, ParseQuality.UNPARSEABLE

# (reply, expected answer, expected rejected, expected quality) with three candidates.
CORPUS = [
    ("Reasoning Step 1: The red chair is candidate 1.\nAnswer: 1", 1, False, CLEAN),
    ("Reasoning Step 1: Only one chair is red.\nReasoning Step 2: It is listed second.\nAnswer: 2", 2, False, CLEAN),
    ("Answer: **2**", 2, False, CLEAN),
    ("**Answer:** 3", 3, False, CLEAN),
    ("answer: 1", 1, False, CLEAN),
    ("Answer: [2]", 2, False, CLEAN),
    ("Answer: Candidate 2.", 2, False, CLEAN),
    ("Answer: 1\nOn second thought:\nAnswer: 3", 3, False, CLEAN),
    ("Answer: nonexistent issue, pick 2", 2, False, CLEAN),
    ("Answer: none", None, True, CLEAN),
    ("Answer: No match found", None, True, CLEAN),
    ("Answer: There is no match here", None, True, CLEAN),
    ("Answer: None of the candidates (1-3) fit", None, True, CLEAN),
    ("Reasoning Step 1: All chairs are blue.\nAnswer: reject", None, True, CLEAN),
    ("Reasoning Step 1: Candidate 1 is a chair.\nThe best match is candidate 2.", 2, False, FALLBACK),
    ("Reasoning Step 1: Candidate 2 sits at 0.500.\nAnswer: the centered one", 2, False, FALLBACK),
    ("Reasoning Step 1: Candidate 3 is the dog.\nAnswer:", 3, False, FALLBACK),
    ("Reasoning Step 1: Nothing fits.\nReasoning Step 2: I think none of them match.", None, True, FALLBACK),
    ("Answer: 7", None, False, UNPARSEABLE),
    ("Answer: 0", None, False, UNPARSEABLE),
    ("I cannot decide.", None, False, UNPARSEABLE),
    ("", None, False, UNPARSEABLE),
]


@pytest.mark.parametrize("reply, answer, rejected, quality", CORPUS)
def test_reply_corpus(reply, answer, rejected, quality):
    trace = parse_reasoning_trace(reply, 3)
    assert (trace.answer, trace.rejected, trace.parse_quality) == (answer, rejected, quality)
    assert trace.raw_text == reply


def test_steps_are_collected_in_order():
    trace = parse_reasoning_trace("Reasoning Step 1: look for chairs\nreasoning step 2 : pick the red one\nAnswer: 1", 3)
    assert trace.steps == ("look for chairs", "pick the red one")


def test_step_numbers_are_not_answers():
    trace = parse_reasoning_trace("Reasoning Step 1: thinking\nReasoning Step 2: still thinking", 3)
    assert trace.parse_quality == UNPARSEABLE
    assert len(trace.steps) == 2


def test_custom_rejection_tokens():
    assert parse_reasoning_trace("Answer: nothing", 3, rejection_tokens=["nothing"]).rejected
    assert parse_reasoning_trace("Answer: nothing", 3).parse_quality == UNPARSEABLE


def test_single_candidate_range():
    assert parse_reasoning_trace("Answer: 1", 1).answer == 1
    assert parse_reasoning_trace("Answer: 2", 1).parse_quality == UNPARSEABLE


def test_requires_at_least_one_candidate():
    with pytest.raises(ValueError, match="n_candidates"):
        parse_reasoning_trace("Answer: 1", 0)
