"""Record/replay cassettes for deterministic, network-free model calls.

A cassette is a jsonl file; each line holds one `{digest, role_kind, response}`
entry. Chat responses are strings, detector responses are lists of
`{label, box}` objects. Request digests cover the role kind, the messages (with
image content reduced to its sha256), the detector vocabulary and threshold,
and the sample index. Endpoint URLs, model names and credentials never enter a
cassette.
"""

# Copyright (c) 2025 Linus Held. All rights reserved.

import hashlib
import json
import logging
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional, Union

from ..errors import CassetteIOError, CassetteMissError
from ..interfaces import ChatBackend, DetectorBackend
from .messages import ChatMessage, Detection, ImagePayload

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CassetteEntry:
    """One recorded request/response pair."""

    digest: str
    role_kind: str
    response: Any

    def to_dict(self) -> dict:
        return {"digest": self.digest, "role_kind": self.role_kind, "response": self.response}


def _canonical(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def chat_digest(role_kind: str, messages: list[ChatMessage], sample_index: int = 0) -> str:
    """Stable digest of a chat request."""
    payload = {
        "role_kind": role_kind,
        "messages": [{"role": m.role.value, "text": m.text, "image": m.image.sha256 if m.image is not None else None} for m in messages],
        "sample_index": sample_index,
    }
    return hashlib.sha256(_canonical(payload).encode("utf-8")).hexdigest()


def detect_digest(role_kind: str, image: ImagePayload, vocabulary: list[str], confidence_threshold: Optional[float]) -> str:
    """Stable digest of a detector request."""
    payload = {"role_kind": role_kind, "image": image.sha256, "vocabulary": list(vocabulary), "confidence_threshold": confidence_threshold}
    return hashlib.sha256(_canonical(payload).encode("utf-8")).hexdigest()


class Cassette:
    """Thread-safe in-memory store mirrored to a jsonl file.

    Args:
        path (Union[str, Path]): Location of the cassette file.
    """

    def __init__(self, path: Union[str, Path]):
        self.path = Path(path)
        self._entries: dict[str, CassetteEntry] = {}
        self._lock = threading.Lock()

    @classmethod
    def load(cls, path: Union[str, Path]) -> "Cassette":
        """Reads every entry of an existing cassette file.

        Raises:
            CassetteIOError: If the file is missing or a line is not a valid entry.
        """
        cassette = cls(path)
        try:
            with open(cassette.path, "r", encoding="utf-8") as f:
                for line_number, line in enumerate(f, start=1):
                    if not line.strip():
                        continue
                    try:
                        data = json.loads(line)
                        entry = CassetteEntry(data["digest"], data["role_kind"], data["response"])
                    except (ValueError, KeyError, TypeError) as exc:
                        raise CassetteIOError(f"{cassette.path}: line {line_number} is not a cassette entry ({exc}).") from exc
                    cassette._entries[entry.digest] = entry
        except OSError as exc:
            raise CassetteIOError(f"Cannot read cassette '{cassette.path}': {exc}") from exc
        logger.info("Loaded %d cassette entries from %s", len(cassette._entries), cassette.path)
        return cassette

    def __len__(self) -> int:
        return len(self._entries)

    def entries(self) -> list[CassetteEntry]:
        with self._lock:
            return list(self._entries.values())

    def lookup(self, digest: str) -> Optional[CassetteEntry]:
        with self._lock:
            return self._entries.get(digest)

    def record(self, entry: CassetteEntry):
        """Adds an entry and appends it to the file; repeated digests are written once.

        Raises:
            CassetteIOError: If the file cannot be written.
        """
        with self._lock:
            if entry.digest in self._entries:
                return
            self._entries[entry.digest] = entry
            try:
                self.path.parent.mkdir(parents=True, exist_ok=True)
                with open(self.path, "a", encoding="utf-8") as f:
                    f.write(json.dumps(entry.to_dict(), ensure_ascii=False) + "\n")
                    f.flush()
            except OSError as exc:
                raise CassetteIOError(f"Cannot write cassette '{self.path}': {exc}") from exc

    def save(self, path: Optional[Union[str, Path]] = None):
        """Rewrites all entries to `path` (default: the cassette's own file)."""
        target = Path(path) if path is not None else self.path
        try:
            target.parent.mkdir(parents=True, exist_ok=True)
            with open(target, "w", encoding="utf-8") as f:
                for entry in self.entries():
                    f.write(json.dumps(entry.to_dict(), ensure_ascii=False) + "\n")
        except OSError as exc:
            raise CassetteIOError(f"Cannot write cassette '{target}': {exc}") from exc


def record_cassette(path: Union[str, Path], entries: list[CassetteEntry]) -> Cassette:
    """Writes a fresh cassette holding `entries`."""
    cassette = Cassette(path)
    for entry in entries:
        cassette._entries.setdefault(entry.digest, entry)
    cassette.save()
    return cassette


def replay_lookup(path: Union[str, Path], digest: str) -> Any:
    """Returns the recorded response for `digest`.

    Raises:
        CassetteMissError: If the cassette holds no such digest.
        CassetteIOError: If the cassette cannot be read.
    """
    entry = Cassette.load(path).lookup(digest)
    if entry is None:
        raise CassetteMissError(digest, "unknown")
    return entry.response


class RecordingChatBackend(ChatBackend):
    """Forwards to a live chat backend and records every exchange."""

    def __init__(self, inner: ChatBackend, cassette: Cassette):
        self.inner = inner
        self.cassette = cassette
        self.role_kind = inner.role_kind

    def complete(self, messages: list[ChatMessage], sample_index: int = 0) -> str:
        digest = chat_digest(self.role_kind, messages, sample_index)
        response = self.inner.complete(messages, sample_index=sample_index)
        self.cassette.record(CassetteEntry(digest, self.role_kind, response))
        return response


class ReplayChatBackend(ChatBackend):
    """Answers chat requests from a cassette without touching the network.

    In non-strict mode a miss falls through to `fallback` when one is given.
    """

    def __init__(self, cassette: Cassette, role_kind: str, strict: bool = True, fallback: Optional[ChatBackend] = None):
        self.cassette = cassette
        self.role_kind = role_kind
        self.strict = strict
        self.fallback = fallback

    def complete(self, messages: list[ChatMessage], sample_index: int = 0) -> str:
        digest = chat_digest(self.role_kind, messages, sample_index)
        entry = self.cassette.lookup(digest)
        if entry is not None:
            return entry.response
        if self.strict or self.fallback is None:
            raise CassetteMissError(digest, self.role_kind)
        logger.warning("Cassette miss for %s request %s; using fallback backend.", self.role_kind, digest[:16])
        return self.fallback.complete(messages, sample_index=sample_index)


class RecordingDetectorBackend(DetectorBackend):
    """Forwards to a live detector and records every response."""

    def __init__(self, inner: DetectorBackend, cassette: Cassette):
        self.inner = inner
        self.cassette = cassette
        self.role_kind = inner.role_kind

    def detect(self, image: ImagePayload, vocabulary: list[str], confidence_threshold: Optional[float] = None) -> list[Detection]:
        digest = detect_digest(self.role_kind, image, vocabulary, confidence_threshold)
        detections = self.inner.detect(image, vocabulary, confidence_threshold)
        self.cassette.record(CassetteEntry(digest, self.role_kind, [d.to_dict() for d in detections]))
        return detections


class ReplayDetectorBackend(DetectorBackend):
    """Answers detector requests from a cassette."""

    def __init__(self, cassette: Cassette, role_kind: str = "detector", strict: bool = True, fallback: Optional[DetectorBackend] = None):
        self.cassette = cassette
        self.role_kind = role_kind
        self.strict = strict
        self.fallback = fallback

    def detect(self, image: ImagePayload, vocabulary: list[str], confidence_threshold: Optional[float] = None) -> list[Detection]:
        digest = detect_digest(self.role_kind, image, vocabulary, confidence_threshold)
        entry = self.cassette.lookup(digest)
        if entry is not None:
            return [Detection.from_dict(item) for item in entry.response]
        if self.strict or self.fallback is None:
            raise CassetteMissError(digest, self.role_kind)
        logger.warning("Cassette miss for detector request %s; using fallback backend.", digest[:16])
        return self.fallback.detect(image, vocabulary, confidence_threshold)
