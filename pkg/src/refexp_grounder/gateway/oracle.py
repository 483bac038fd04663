"""Deterministic backends answering from a scene manifest.

Each oracle plays one model role over a single synthetic scene, so the output
of the full pipeline can be predicted by hand from the manifest.
"""

# Copyright (c) 2025 Linus Held. All rights reserved.

import hashlib
import logging
import re
import threading
from collections import Counter
from typing import Optional

from ..errors import NoMatchingObjectError, OracleRequestError
from ..geometry import NormalizedBox, PixelBox, denormalize
from ..interfaces import ChatBackend, DetectorBackend
from ..scenes.manifest import SceneManifest, SceneObject
from ..scenes.palette import COLOR_NAMES
from .messages import ChatMessage, Detection, ImagePayload, Role, normalize_concept

logger = logging.getLogger(__name__)

DESCRIBE_MODES = ("attributes", "query_echo", "query_plus")

STOPWORDS = frozenset({"the", "a", "an", "of", "in", "on", "with", "and", "to", "by", "is"})

_TOKEN = re.compile(r"[a-z0-9]+")
_QUERY_LINE = re.compile(r"^Query: (.*)$", re.MULTILINE)
_CANDIDATE_LINE = re.compile(r"^(\d+)\. (.+?)\[\d+\.\d{3}, \d+\.\d{3}, \d+\.\d{3}, \d+\.\d{3}\]$")
_DESCRIPTION_LINE = re.compile(r"^Instance Description: (.*)$")
_ENUMERATED_LINE = re.compile(r"^\d+\. (.*)$", re.MULTILINE)
_COORDS = re.compile(r"\[(\d+\.\d{3}), (\d+\.\d{3}), (\d+\.\d{3}), (\d+\.\d{3})\]")

PALETTE = COLOR_NAMES


def content_tokens(text: str) -> list[str]:
    """Lowercase word tokens without stopwords, first occurrence order."""
    seen = []
    for token in _TOKEN.findall(text.lower()):
        if token not in STOPWORDS and token not in seen:
            seen.append(token)
    return seen


def coverage(query: str, text: str) -> float:
    """Share of the query's content tokens that also occur in `text`."""
    wanted = content_tokens(query)
    if not wanted:
        return 0.0
    present = set(content_tokens(text))
    return sum(1 for token in wanted if token in present) / len(wanted)


def _hash_unit(*parts) -> float:
    digest = hashlib.sha256(":".join(str(p) for p in parts).encode("utf-8")).hexdigest()
    return int(digest[:8], 16) / 2**32


def _split_messages(messages: list[ChatMessage]) -> tuple[str, list[ChatMessage]]:
    system = next((m.text for m in messages if m.role == Role.SYSTEM), "")
    users = [m for m in messages if m.role == Role.USER]
    if not users:
        raise OracleRequestError("Oracle request carries no user message.")
    return system, users


def oracle_describe(scene: SceneManifest, box: PixelBox, mode: str, query: Optional[str] = None) -> str:
    """Describes the scene object under `box` the way a perfect describer would.

    Args:
        scene (SceneManifest): Ground truth of the scene.
        box (PixelBox): Region to describe; must overlap an object at IoU >= 0.5.
        mode (str): `attributes` returns the object's attribute sentence,
            `query_echo` the query, `query_plus` the query followed by the caption.
        query (Optional[str]): Query to echo; defaults to the scene query
            targeting the matched object, then to its attribute sentence.

    Raises:
        NoMatchingObjectError: If no object matches the box.
        ValueError: If the mode is unknown.
    """
    if mode not in DESCRIBE_MODES:
        raise ValueError(f"Unknown describe mode: {mode}")
    obj = scene.match_box(box)
    if obj is None:
        raise NoMatchingObjectError(f"Box {box.to_list()} matches no object in scene '{scene.scene_id}'.")
    if mode == "attributes":
        return obj.attribute_sentence
    echoed = query or scene.query_for_object(obj.object_id) or obj.attribute_sentence
    if mode == "query_echo":
        return echoed
    return f"{echoed} {scene.caption}"


class OracleLLM(ChatBackend):
    """Text-only oracle covering concept extraction, selection and aggregation.

    Args:
        scene (SceneManifest): Scene the requests refer to.
        selector_threshold (float): Minimum query-token coverage for the selector
            to accept a candidate; below it the oracle rejects.
    """

    role_kind = "llm"

    def __init__(self, scene: SceneManifest, selector_threshold: float = 1.0):
        self.scene = scene
        self.selector_threshold = selector_threshold

    def complete(self, messages: list[ChatMessage], sample_index: int = 0) -> str:
        system, users = _split_messages(messages)
        if system.startswith("You are an object extractor"):
            match = _QUERY_LINE.search(users[0].text)
            return self._extract(match.group(1) if match else users[0].text)
        if system.startswith("You are a subject extractor"):
            return self._extract(users[0].text)
        if '"Blind Teacher"' in system:
            return self._select(users[0].text, system)
        if system.startswith("You are a description aggregator"):
            return self._aggregate(users[-1].text)
        raise OracleRequestError("Oracle LLM does not recognize the request.")

    def _extract(self, query: str) -> str:
        concepts = []
        for token in content_tokens(query):
            names = [token]
            for obj in self.scene.objects:
                if token in obj.names:
                    names.extend(obj.names)
            for name in names:
                if name not in concepts:
                    concepts.append(name)
        return ", ".join(concepts)

    def _select(self, query: str, system: str) -> str:
        candidates = self._parse_candidates(system)
        if not candidates:
            raise OracleRequestError("Selection prompt lists no candidates.")

        n_terms = len(content_tokens(query))
        scored = [(coverage(query, text), index) for index, text in candidates]
        best_score = max(score for score, _ in scored)
        best_index = min(index for score, index in scored if score == best_score)
        steps = [f"Reasoning Step 1: The query asks for: {', '.join(content_tokens(query))}."]

        if best_score < self.selector_threshold:
            steps.append(f"Reasoning Step 2: No candidate covers enough query terms (best {round(best_score * n_terms)} of {n_terms}).")
            return "\n".join(steps + ["Answer: none"])
        steps.append(f"Reasoning Step 2: Candidate {best_index} covers {round(best_score * n_terms)} of {n_terms} query terms.")
        return "\n".join(steps + [f"Answer: {best_index}"])

    @staticmethod
    def _parse_candidates(system: str) -> list[tuple[int, str]]:
        lines = system.splitlines()
        candidates = []
        for position, line in enumerate(lines):
            match = _CANDIDATE_LINE.match(line)
            if not match:
                continue
            text = match.group(2)
            if position + 1 < len(lines):
                description = _DESCRIPTION_LINE.match(lines[position + 1])
                if description:
                    text = description.group(1)
            candidates.append((int(match.group(1)), text))
        return candidates

    @staticmethod
    def _aggregate(user_text: str) -> str:
        samples = [line.strip() for line in _ENUMERATED_LINE.findall(user_text)]
        if not samples:
            raise OracleRequestError("Aggregation prompt lists no descriptions.")
        return Counter(samples).most_common(1)[0][0]


class OracleMLLM(ChatBackend):
    """Multimodal oracle answering caption and instance-description requests.

    Args:
        scene (SceneManifest): Scene the requests refer to.
        describe_mode (str): One of `attributes`, `query_echo`, `query_plus`.
        corruption_rate (float): Share of (object, sample) pairs described with a
            wrong color in `attributes` mode.
        seed (int): Seed of the deterministic corruption hash.
    """

    role_kind = "mllm"

    def __init__(self, scene: SceneManifest, describe_mode: str = "attributes", corruption_rate: float = 0.0, seed: int = 0):
        if describe_mode not in DESCRIBE_MODES:
            raise ValueError(f"Unknown describe mode: {describe_mode}")
        self.scene = scene
        self.describe_mode = describe_mode
        self.corruption_rate = corruption_rate
        self.seed = seed

    def complete(self, messages: list[ChatMessage], sample_index: int = 0) -> str:
        _, users = _split_messages(messages)
        request = users[-1]
        if request.image is not None and request.image.dims != self.scene.dims:
            raise OracleRequestError(f"Image is {request.image.dims.width}x{request.image.dims.height}, scene '{self.scene.scene_id}' is {self.scene.width}x{self.scene.height}.")

        text = request.text.strip()
        if text.startswith("Describe the image"):
            return self.scene.caption
        if text.startswith("Describe the object marked by"):
            return self._describe(text, sample_index)
        raise OracleRequestError("Oracle MLLM does not recognize the request.")

    def _describe(self, text: str, sample_index: int) -> str:
        match = _COORDS.search(text)
        if not match:
            raise OracleRequestError("Instance prompt carries no normalized coordinates.")
        box = denormalize(NormalizedBox(*(float(v) for v in match.groups())), self.scene.dims)
        description = oracle_describe(self.scene, box, self.describe_mode)
        if self.describe_mode == "attributes":
            obj = self.scene.match_box(box)
            if self.is_corrupted(obj, sample_index):
                return self._corrupted_sentence(obj)
        return description

    def is_corrupted(self, obj: SceneObject, sample_index: int = 0) -> bool:
        if self.corruption_rate <= 0:
            return False
        return _hash_unit(self.seed, self.scene.scene_id, obj.object_id, sample_index) < self.corruption_rate

    def _corrupted_sentence(self, obj: SceneObject) -> str:
        used = {o.color for o in self.scene.objects}
        spare = [color for color in PALETTE if color not in used] or [color for color in PALETTE if color != obj.color]
        wrong = spare[int(_hash_unit(self.seed, self.scene.scene_id, obj.object_id, "color") * len(spare))]
        return f"a {wrong} {obj.label}"


class OracleDetector(DetectorBackend):
    """Detector oracle returning the manifest box of every object named in the vocabulary.

    An object matches a term through its label or any synonym, and only when its
    confidence reaches the pass-through threshold.
    """

    role_kind = "detector"

    def __init__(self, scene: SceneManifest):
        self.scene = scene

    def detect(self, image: ImagePayload, vocabulary: list[str], confidence_threshold: Optional[float] = None) -> list[Detection]:
        if image.dims != self.scene.dims:
            raise OracleRequestError(f"Image is {image.dims.width}x{image.dims.height}, scene '{self.scene.scene_id}' is {self.scene.width}x{self.scene.height}.")
        threshold = confidence_threshold or 0.0
        detections = []
        for term in vocabulary:
            concept = normalize_concept(term)
            for obj in self.scene.objects:
                if concept in obj.names and obj.confidence >= threshold:
                    detections.append(Detection(concept, obj.pixel_box))
        return detections


class ScriptedBackend(ChatBackend):
    """Returns canned replies in order and records every request.

    Raises:
        OracleRequestError: When more requests arrive than replies were scripted.
    """

    def __init__(self, replies: list[str], role_kind: str = "llm"):
        self.role_kind = role_kind
        self._replies = list(replies)
        self._lock = threading.Lock()
        self.calls: list[list[ChatMessage]] = []

    def complete(self, messages: list[ChatMessage], sample_index: int = 0) -> str:
        with self._lock:
            self.calls.append(list(messages))
            if not self._replies:
                raise OracleRequestError("Scripted backend ran out of replies.")
            return self._replies.pop(0)
