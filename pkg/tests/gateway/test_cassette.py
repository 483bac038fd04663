import json

import numpy as np
import pytest

from refexp_grounder.errors import CassetteIOError, CassetteMissError
from refexp_grounder.gateway import (
    Cassette,
    CassetteEntry,
    ChatMessage,
    Detection,
    ImagePayload,
    RecordingChatBackend,
    RecordingDetectorBackend,
    ReplayChatBackend,
    ReplayDetectorBackend,
    ScriptedBackend,
    chat_digest,
    detect_digest,
    record_cassette,
    replay_lookup,
)
from refexp_grounder.geometry import PixelBox
from refexp_grounder.interfaces import DetectorBackend


class CountingDetector(DetectorBackend):
    def __init__(self):
        self.calls = 0

    def detect(self, image, vocabulary, confidence_threshold=None):
        self.calls += 1
        return [Detection(vocabulary[0], PixelBox(1, 2, 10, 12))]


@pytest.fixture
def image():
    return ImagePayload.from_array(np.zeros((16, 16, 3), dtype=np.uint8))


def conversation(text="the red chair"):
    return [ChatMessage.system("You are an object extractor."), ChatMessage.user(text)]


def test_chat_digest_depends_on_content_and_sample_index(image):
    base = chat_digest("llm", conversation())
    assert base == chat_digest("llm", conversation())
    assert base != chat_digest("llm", conversation("the blue chair"))
    assert base != chat_digest("mllm", conversation())
    assert base != chat_digest("llm", conversation(), sample_index=1)

    with_image = [ChatMessage.user("Describe the image in a few sentences.", image)]
    assert chat_digest("mllm", with_image) == chat_digest("mllm", [ChatMessage.user("Describe the image in a few sentences.", ImagePayload.from_bytes(image.data))])


def test_detect_digest_covers_vocabulary_and_threshold(image):
    digest = detect_digest("detector", image, ["chair"], None)
    assert digest != detect_digest("detector", image, ["chair", "seat"], None)
    assert digest != detect_digest("detector", image, ["chair"], 0.3)


def test_record_then_replay_answers_without_inner_backend(tmp_path):
    path = tmp_path / "calls.cassette.jsonl"
    inner = ScriptedBackend(["red, chair, seat"])
    recorder = RecordingChatBackend(inner, Cassette(path))
    assert recorder.complete(conversation()) == "red, chair, seat"

    replay = ReplayChatBackend(Cassette.load(path), "llm")
    assert replay.complete(conversation()) == "red, chair, seat"
    assert len(inner.calls) == 1


def test_repeated_requests_are_written_once(tmp_path):
    path = tmp_path / "calls.jsonl"
    recorder = RecordingChatBackend(ScriptedBackend(["a", "a"]), Cassette(path))
    recorder.complete(conversation())
    recorder.complete(conversation())
    assert len(path.read_text(encoding="utf-8").splitlines()) == 1


def test_strict_replay_miss_names_the_digest(tmp_path):
    path = tmp_path / "calls.jsonl"
    RecordingChatBackend(ScriptedBackend(["x"]), Cassette(path)).complete(conversation(), sample_index=0)

    replay = ReplayChatBackend(Cassette.load(path), "llm")
    expected = chat_digest("llm", conversation(), sample_index=1)
    with pytest.raises(CassetteMissError) as excinfo:
        replay.complete(conversation(), sample_index=1)
    assert excinfo.value.digest == expected
    assert excinfo.value.role_kind == "llm"


def test_non_strict_replay_falls_back_on_miss(tmp_path):
    fallback = ScriptedBackend(["from fallback"])
    replay = ReplayChatBackend(Cassette(tmp_path / "empty.jsonl"), "llm", strict=False, fallback=fallback)
    assert replay.complete(conversation()) == "from fallback"


def test_detector_responses_round_trip_through_the_file(tmp_path, image):
    path = tmp_path / "detector.jsonl"
    inner = CountingDetector()
    recorded = RecordingDetectorBackend(inner, Cassette(path)).detect(image, ["dog"], 0.25)

    replayed = ReplayDetectorBackend(Cassette.load(path)).detect(image, ["dog"], 0.25)
    assert replayed == recorded
    assert inner.calls == 1
    with pytest.raises(CassetteMissError):
        ReplayDetectorBackend(Cassette.load(path)).detect(image, ["dog"], 0.5)


def test_corrupt_line_reports_its_line_number(tmp_path):
    path = tmp_path / "broken.jsonl"
    good = json.dumps(CassetteEntry("abc", "llm", "ok").to_dict())
    path.write_text(good + "\n{not json\n", encoding="utf-8")
    with pytest.raises(CassetteIOError, match="line 2"):
        Cassette.load(path)


def test_missing_cassette_is_io_error(tmp_path):
    with pytest.raises(CassetteIOError, match="Cannot read cassette"):
        Cassette.load(tmp_path / "absent.jsonl")


def test_record_cassette_and_replay_lookup(tmp_path):
    path = tmp_path / "manual.jsonl"
    record_cassette(path, [CassetteEntry("d1", "llm", "one"), CassetteEntry("d2", "detector", [{"label": "dog", "box": [0, 0, 4, 4]}])])
    assert replay_lookup(path, "d1") == "one"
    assert replay_lookup(path, "d2")[0]["label"] == "dog"
    with pytest.raises(CassetteMissError):
        replay_lookup(path, "d3")
