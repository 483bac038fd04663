"""Connection settings for one model role."""

# Copyright (c) 2025 Linus Held. All rights reserved.

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class EndpointConfig(BaseModel):
    """Settings for one model role (LLM, MLLM or detector).

    Attributes:
        backend (str): `http` talks to a live endpoint, `oracle` answers from the
            scene manifest next to each image.
        base_url (str): Root URL of the HTTP endpoint.
        model_name (str): Model identifier sent with chat requests.
        api_key_env (Optional[str]): Name of the environment variable holding the
            API key. The key itself never appears in any file.
        timeout (float): Per-request timeout in seconds.
        max_retries (int): Retries on transport failures, never on content errors.
        backoff_initial (float): First backoff delay in seconds, doubled per retry.
        temperature (float): Sampling temperature for chat roles.
        max_in_flight (int): Cap on simultaneous requests against this endpoint.
        confidence_threshold (Optional[float]): Detector pass-through threshold.
    """

    model_config = ConfigDict(extra="forbid", frozen=True, protected_namespaces=())

    backend: Literal["http", "oracle"] = "oracle"
    base_url: str = ""
    model_name: str = ""
    api_key_env: Optional[str] = None
    timeout: float = Field(default=60.0, gt=0)
    max_retries: int = Field(default=3, ge=0)
    backoff_initial: float = Field(default=1.0, ge=0)
    temperature: float = Field(default=0.0, ge=0)
    max_in_flight: int = Field(default=4, ge=1)
    confidence_threshold: Optional[float] = Field(default=None, ge=0, le=1)

    @model_validator(mode="after")
    def _check_http_url(self) -> "EndpointConfig":
        if self.backend == "http" and not self.base_url:
            raise ValueError("base_url is required for http backends")
        return self
