import httpx
import pytest

from refexp_grounder.config import RunConfig
from refexp_grounder.errors import CassetteIOError, ConfigError
from refexp_grounder.gateway import (
    BackendProvider,
    ChatMessage,
    HttpChatBackend,
    OracleDetector,
    OracleLLM,
    OracleMLLM,
    RecordingChatBackend,
    RecordingDetectorBackend,
    ReplayChatBackend,
    ReplayDetectorBackend,
)


def test_oracle_roles_are_bound_to_the_manifest(two_chairs, scene_writer):
    image_path = scene_writer(two_chairs)
    config = RunConfig(oracle={"describe_mode": "query_echo", "corruption_rate": 0.0, "seed": 5})
    backends = BackendProvider(config).for_image(image_path)

    assert isinstance(backends.llm, OracleLLM)
    assert isinstance(backends.mllm, OracleMLLM)
    assert isinstance(backends.detector, OracleDetector)
    assert backends.mllm.describe_mode == "query_echo"
    assert backends.mllm.seed == 5
    assert backends.llm.scene.scene_id == "hand"


def test_manifest_is_loaded_once(two_chairs, scene_writer):
    image_path = scene_writer(two_chairs)
    provider = BackendProvider(RunConfig())
    assert provider.manifest_for(image_path) is provider.manifest_for(image_path)


def test_missing_manifest_is_config_error(tmp_path):
    with pytest.raises(ConfigError, match="Cannot read scene manifest"):
        BackendProvider(RunConfig()).for_image(tmp_path / "nowhere.png")


def test_http_roles_are_shared_across_images(two_chairs, scene_writer):
    image_path = scene_writer(two_chairs)
    config = RunConfig(llm={"backend": "http", "base_url": "http://llm.provider.test", "backoff_initial": 0.0})
    transport = httpx.MockTransport(lambda request: httpx.Response(200, json={"choices": [{"message": {"content": "chair"}}]}))
    provider = BackendProvider(config, transports={"llm": transport})

    first = provider.for_image(image_path)
    second = provider.for_image(image_path)
    assert isinstance(first.llm, HttpChatBackend)
    assert first.llm is second.llm
    assert first.llm.complete([ChatMessage.user("hi")]) == "chair"
    assert isinstance(first.mllm, OracleMLLM)


def test_record_mode_wraps_and_overwrites(two_chairs, scene_writer, tmp_path, caplog):
    image_path = scene_writer(two_chairs)
    cassette_path = tmp_path / "old.cassette.jsonl"
    cassette_path.write_text("stale\n", encoding="utf-8")

    provider = BackendProvider(RunConfig(cassette={"mode": "record", "path": str(cassette_path)}))
    backends = provider.for_image(image_path)

    assert not cassette_path.exists()
    assert "Overwriting existing cassette" in caplog.text
    assert isinstance(backends.llm, RecordingChatBackend)
    assert isinstance(backends.detector, RecordingDetectorBackend)


def test_strict_replay_uses_only_the_cassette(two_chairs, scene_writer, tmp_path):
    image_path = scene_writer(two_chairs)
    cassette_path = tmp_path / "calls.cassette.jsonl"
    cassette_path.write_text("", encoding="utf-8")

    backends = BackendProvider(RunConfig(cassette={"mode": "replay", "path": str(cassette_path)})).for_image(image_path)
    assert isinstance(backends.mllm, ReplayChatBackend)
    assert isinstance(backends.detector, ReplayDetectorBackend)
    assert backends.mllm.fallback is None

    lenient = BackendProvider(RunConfig(cassette={"mode": "replay", "path": str(cassette_path), "strict": False})).for_image(image_path)
    assert isinstance(lenient.llm.fallback, OracleLLM)


def test_replay_without_cassette_file_fails_early(tmp_path):
    with pytest.raises(CassetteIOError):
        BackendProvider(RunConfig(cassette={"mode": "replay", "path": str(tmp_path / "missing.jsonl")}))
