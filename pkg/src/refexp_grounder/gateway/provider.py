"""Builds the backend trio for each image from the run configuration."""

# Copyright (c) 2025 Linus Held. All rights reserved.

import logging
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING, Optional, Union

import httpx

from ..interfaces import ChatBackend, DetectorBackend
from ..scenes.manifest import SceneManifest, manifest_path_for
from .cassette import Cassette, RecordingChatBackend, RecordingDetectorBackend, ReplayChatBackend, ReplayDetectorBackend
from .http_backend import HttpChatBackend, HttpDetectorBackend
from .oracle import OracleDetector, OracleLLM, OracleMLLM

if TYPE_CHECKING:
    from ..config import RunConfig

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BackendSet:
    """The three model roles used to ground one image."""

    llm: ChatBackend
    mllm: ChatBackend
    detector: DetectorBackend


class BackendProvider:
    """Resolves configured backends per image.

    Oracle roles are bound to the scene manifest next to the image; HTTP roles
    are built once and shared. Cassette recording or replay wraps whichever
    backend results. Strict replay never constructs an HTTP client.

    Args:
        config (RunConfig): Validated run configuration.
        transports (Optional[dict[str, httpx.BaseTransport]]): Per-role transports
            (`llm`, `mllm`, `detector`) injected into HTTP backends.
    """

    def __init__(self, config: "RunConfig", transports: Optional[dict[str, httpx.BaseTransport]] = None):
        self.config = config
        self._transports = transports or {}
        self._http: dict[str, Union[ChatBackend, DetectorBackend]] = {}
        self._manifests: dict[Path, SceneManifest] = {}
        self._lock = threading.Lock()
        self.cassette = self._open_cassette()

    def _open_cassette(self) -> Optional[Cassette]:
        settings = self.config.cassette
        if settings.mode == "replay":
            return Cassette.load(settings.path)
        if settings.mode == "record":
            path = Path(settings.path)
            if path.exists():
                logger.warning("Overwriting existing cassette %s", path)
                path.unlink()
            logger.info("Recording model calls to %s", path)
            return Cassette(path)
        return None

    def manifest_for(self, image_path: Union[str, Path]) -> SceneManifest:
        """Loads (once) the scene manifest that sits next to an image."""
        path = manifest_path_for(image_path)
        with self._lock:
            if path not in self._manifests:
                self._manifests[path] = SceneManifest.from_yaml(path)
            return self._manifests[path]

    def _http_backend(self, role: str) -> Union[ChatBackend, DetectorBackend]:
        with self._lock:
            if role not in self._http:
                endpoint = getattr(self.config, role)
                transport = self._transports.get(role)
                if role == "detector":
                    self._http[role] = HttpDetectorBackend(endpoint, transport)
                else:
                    self._http[role] = HttpChatBackend(endpoint, role, transport)
            return self._http[role]

    def _live_backend(self, role: str, image_path: Union[str, Path]) -> Union[ChatBackend, DetectorBackend]:
        if getattr(self.config, role).backend == "http":
            return self._http_backend(role)
        scene = self.manifest_for(image_path)
        oracle = self.config.oracle
        if role == "llm":
            return OracleLLM(scene, oracle.selector_threshold)
        if role == "mllm":
            return OracleMLLM(scene, oracle.describe_mode, oracle.corruption_rate, oracle.seed)
        return OracleDetector(scene)

    def _wrap(self, role: str, image_path: Union[str, Path]) -> Union[ChatBackend, DetectorBackend]:
        mode = self.config.cassette.mode
        if mode == "replay":
            strict = self.config.cassette.strict
            fallback = None if strict else self._live_backend(role, image_path)
            if role == "detector":
                return ReplayDetectorBackend(self.cassette, role, strict, fallback)
            return ReplayChatBackend(self.cassette, role, strict, fallback)

        backend = self._live_backend(role, image_path)
        if mode == "record":
            if role == "detector":
                return RecordingDetectorBackend(backend, self.cassette)
            return RecordingChatBackend(backend, self.cassette)
        return backend

    def for_image(self, image_path: Union[str, Path]) -> BackendSet:
        """Returns the backends to use for one image."""
        return BackendSet(llm=self._wrap("llm", image_path), mllm=self._wrap("mllm", image_path), detector=self._wrap("detector", image_path))
