"""Model gateway: message types, role entry points and backends."""

# Copyright (c) 2025 Linus Held. All rights reserved.

from .cassette import (
    Cassette,
    CassetteEntry,
    RecordingChatBackend,
    RecordingDetectorBackend,
    ReplayChatBackend,
    ReplayDetectorBackend,
    chat_digest,
    detect_digest,
    record_cassette,
    replay_lookup,
)
from .client import detect, llm_complete, mllm_complete
from .endpoint import EndpointConfig
from .http_backend import HttpChatBackend, HttpDetectorBackend
from .messages import ChatMessage, Detection, ImagePayload, Role, normalize_concept
from .oracle import DESCRIBE_MODES, OracleDetector, OracleLLM, OracleMLLM, ScriptedBackend, content_tokens, coverage, oracle_describe
from .provider import BackendProvider, BackendSet

__all__ = [
    "BackendProvider",
    "BackendSet",
    "Cassette",
    "CassetteEntry",
    "ChatMessage",
    "DESCRIBE_MODES",
    "Detection",
    "EndpointConfig",
    "HttpChatBackend",
    "HttpDetectorBackend",
    "ImagePayload",
    "OracleDetector",
    "OracleLLM",
    "OracleMLLM",
    "RecordingChatBackend",
    "RecordingDetectorBackend",
    "ReplayChatBackend",
    "ReplayDetectorBackend",
    "Role",
    "ScriptedBackend",
    "chat_digest",
    "content_tokens",
    "coverage",
    "detect",
    "detect_digest",
    "llm_complete",
    "mllm_complete",
    "normalize_concept",
    "oracle_describe",
    "record_cassette",
    "replay_lookup",
]
