"""Exception hierarchy shared by every module of the grounding engine."""

# Copyright (c) 2025 Linus Held. All rights reserved.

from typing import Any, Optional


class GroundingError(Exception):
    """Base class for all errors raised by the engine."""


class ConfigError(GroundingError, ValueError):
    """Raised when a configuration file or value fails validation."""


# --- Gateway ---


class GatewayError(GroundingError):
    """Base class for model-backend failures."""


class TransportError(GatewayError):
    """The endpoint could not be reached or kept failing after all retries."""


class MalformedResponseError(GatewayError, ValueError):
    """The endpoint answered, but the payload does not match the protocol."""


class AuthError(GatewayError):
    """The endpoint rejected the credentials (HTTP 401/403)."""


class CassetteMissError(GatewayError):
    """Strict replay found no recorded response for a request digest."""

    def __init__(self, digest: str, role_kind: str):
        self.digest = digest
        self.role_kind = role_kind
        super().__init__(f"No cassette entry for {role_kind} request {digest[:16]}.")


class CassetteIOError(GatewayError):
    """A cassette file could not be read or written."""


class NoMatchingObjectError(GatewayError):
    """An oracle was asked about a box that matches no scene object."""


class OracleRequestError(GatewayError):
    """An oracle backend received a request it does not know how to answer."""


# --- Pipeline ---


class EmptyCaptionError(GroundingError):
    """The captioning model returned no text."""


class EmptyConceptSetError(GroundingError):
    """Concept extraction produced no usable concept."""


class EmptyCandidateSetError(GroundingError):
    """No candidate box survived detection and refinement."""


class SelectionError(GroundingError):
    """The selection trace stayed unparseable after every re-prompt."""


class StageError(GroundingError):
    """Wraps a failure raised inside a pipeline stage and tags it with the stage name.

    Attributes:
        stage (str): Name of the failing stage.
        cause (Exception): The original exception.
        candidate_index (Optional[int]): 1-based candidate index, when the failure
            concerns a single candidate.
        context (Optional[Any]): The pipeline context the failing stage received,
            attached by the pipeline runner.
    """

    def __init__(self, stage: str, cause: Exception, candidate_index: Optional[int] = None):
        self.stage = stage
        self.cause = cause
        self.candidate_index = candidate_index
        self.context: Optional[Any] = None
        where = f"[{stage}]" if candidate_index is None else f"[{stage} #{candidate_index}]"
        super().__init__(f"{where} {cause}")


# --- Evaluation ---


class DatasetParseError(GroundingError, ValueError):
    """A dataset line could not be parsed or violates a record invariant."""

    def __init__(self, line_number: int, reason: str):
        self.line_number = line_number
        self.reason = reason
        super().__init__(f"line {line_number}: {reason}")


class MissingImageError(GroundingError):
    """A dataset record points to an image that does not exist."""


class EmptySplitError(GroundingError, ValueError):
    """Metrics were requested for an empty set of outcomes."""


class ReportIOError(GroundingError):
    """A report file could not be written or read back."""


class MetricsInvariantError(GroundingError):
    """Aggregated metrics violate accuracy <= generation recall."""


class SampleError(GroundingError):
    """Grounding one dataset sample failed; names the sample and keeps the cause."""

    def __init__(self, sample_id: str, cause: Exception):
        self.sample_id = sample_id
        self.cause = cause
        super().__init__(f"sample '{sample_id}': {cause}")
