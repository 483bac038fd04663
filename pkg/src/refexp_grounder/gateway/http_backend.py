"""Live HTTP backends for the chat-completion and detector protocols."""

# Copyright (c) 2025 Linus Held. All rights reserved.

import logging
import os
import threading
import time
from typing import Any, Optional

import httpx

from ..errors import AuthError, MalformedResponseError, TransportError
from ..geometry import PixelBox
from ..interfaces import ChatBackend, DetectorBackend
from .endpoint import EndpointConfig
from .messages import ChatMessage, Detection, ImagePayload, normalize_concept

logger = logging.getLogger(__name__)

_RETRYABLE_STATUS = {429, 500, 502, 503, 504}
_AUTH_STATUS = {401, 403}

_limiters: dict[str, threading.BoundedSemaphore] = {}
_limiters_lock = threading.Lock()


def endpoint_limiter(base_url: str, max_in_flight: int) -> threading.BoundedSemaphore:
    """Returns the process-wide in-flight limiter for an endpoint URL.

    The first caller fixes the capacity; later callers share that semaphore.
    """
    with _limiters_lock:
        if base_url not in _limiters:
            _limiters[base_url] = threading.BoundedSemaphore(max_in_flight)
        return _limiters[base_url]


class HttpEndpoint:
    """Shared plumbing for one HTTP endpoint: auth, retries and the in-flight cap.

    Args:
        config (EndpointConfig): Endpoint settings.
        transport (Optional[httpx.BaseTransport]): Injected transport, used by
            tests to answer requests offline.
    """

    def __init__(self, config: EndpointConfig, transport: Optional[httpx.BaseTransport] = None):
        self.config = config
        self._client = httpx.Client(base_url=config.base_url, timeout=config.timeout, transport=transport)
        self._limiter = endpoint_limiter(config.base_url, config.max_in_flight)

    def _headers(self) -> dict[str, str]:
        if not self.config.api_key_env:
            return {}
        key = os.environ.get(self.config.api_key_env)
        if not key:
            raise AuthError(f"Environment variable '{self.config.api_key_env}' is not set.")
        return {"Authorization": f"Bearer {key}"}

    def post_json(self, path: str, payload: dict[str, Any]) -> Any:
        """POSTs a JSON payload and returns the decoded JSON body.

        Transport failures, 429 and 5xx responses are retried with exponential
        backoff. Authentication failures and other client errors are not.

        Raises:
            AuthError: On HTTP 401/403 or a missing key variable.
            TransportError: When the endpoint stays unreachable or keeps failing.
            MalformedResponseError: When the body is not valid JSON.
        """
        headers = self._headers()
        delay = self.config.backoff_initial
        last_problem = ""

        for attempt in range(self.config.max_retries + 1):
            if attempt > 0:
                logger.warning("Retrying %s%s (attempt %d/%d) after: %s", self.config.base_url, path, attempt, self.config.max_retries, last_problem)
                time.sleep(delay)
                delay *= 2

            try:
                with self._limiter:
                    response = self._client.post(path, json=payload, headers=headers)
            except httpx.TransportError as exc:
                last_problem = f"{type(exc).__name__}: {exc}"
                continue

            if response.status_code in _AUTH_STATUS:
                raise AuthError(f"{self.config.base_url}{path} rejected the credentials (HTTP {response.status_code}).")
            if response.status_code in _RETRYABLE_STATUS:
                last_problem = f"HTTP {response.status_code}"
                continue
            if response.status_code >= 400:
                raise TransportError(f"{self.config.base_url}{path} answered HTTP {response.status_code}.")

            try:
                return response.json()
            except ValueError as exc:
                raise MalformedResponseError(f"{self.config.base_url}{path} returned invalid JSON: {exc}") from exc

        raise TransportError(f"{self.config.base_url}{path} failed after {self.config.max_retries} retries: {last_problem}")

    def close(self):
        self._client.close()


def _message_to_wire(message: ChatMessage) -> dict[str, Any]:
    if message.image is None:
        return {"role": message.role.value, "content": message.text}
    return {
        "role": message.role.value,
        "content": [
            {"type": "text", "text": message.text},
            {"type": "image_url", "image_url": {"url": message.image.to_data_url()}},
        ],
    }


class HttpChatBackend(ChatBackend):
    """Chat-completion client for the LLM and MLLM roles."""

    def __init__(self, config: EndpointConfig, role_kind: str, transport: Optional[httpx.BaseTransport] = None):
        self.config = config
        self.role_kind = role_kind
        self._endpoint = HttpEndpoint(config, transport)

    def complete(self, messages: list[ChatMessage], sample_index: int = 0) -> str:
        payload = {
            "model": self.config.model_name,
            "messages": [_message_to_wire(message) for message in messages],
            "temperature": self.config.temperature,
        }
        body = self._endpoint.post_json("/chat/completions", payload)
        try:
            content = body["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise MalformedResponseError(f"Chat response lacks choices[0].message.content: {exc!r}") from exc
        if not isinstance(content, str):
            raise MalformedResponseError(f"Chat response content is {type(content).__name__}, expected str.")
        return content


class HttpDetectorBackend(DetectorBackend):
    """Client for the open-vocabulary detector endpoint.

    Boxes reaching past the image border are clamped (and logged); boxes that
    collapse to zero area after clamping are dropped.
    """

    def __init__(self, config: EndpointConfig, transport: Optional[httpx.BaseTransport] = None):
        self.config = config
        self._endpoint = HttpEndpoint(config, transport)

    def detect(self, image: ImagePayload, vocabulary: list[str], confidence_threshold: Optional[float] = None) -> list[Detection]:
        threshold = confidence_threshold if confidence_threshold is not None else self.config.confidence_threshold
        payload = {"image": image.to_base64(), "vocabulary": list(vocabulary), "confidence_threshold": threshold}
        body = self._endpoint.post_json("/detect", payload)

        try:
            raw_detections = body["detections"]
            parsed = [(normalize_concept(str(item["label"])), [float(v) for v in item["box"]]) for item in raw_detections]
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedResponseError(f"Detector response is malformed: {exc!r}") from exc

        detections = []
        for label, coords in parsed:
            if len(coords) != 4 or not label:
                raise MalformedResponseError(f"Detector returned an invalid detection: label={label!r}, box={coords}.")
            box = self._clamp(coords, image)
            if box is not None:
                detections.append(Detection(label, box))
        return detections

    @staticmethod
    def _clamp(coords: list[float], image: ImagePayload) -> Optional[PixelBox]:
        x_min, y_min, x_max, y_max = coords
        clamped = [
            min(max(x_min, 0.0), float(image.dims.width)),
            min(max(y_min, 0.0), float(image.dims.height)),
            min(max(x_max, 0.0), float(image.dims.width)),
            min(max(y_max, 0.0), float(image.dims.height)),
        ]
        if clamped != coords:
            logger.warning("Clamped detector box %s to image bounds %dx%d.", coords, image.dims.width, image.dims.height)
        if clamped[0] >= clamped[2] or clamped[1] >= clamped[3]:
            logger.warning("Dropped detector box %s: degenerate after clamping.", coords)
            return None
        return PixelBox(*clamped)
