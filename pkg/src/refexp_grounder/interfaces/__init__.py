"""Exposes the abstract contracts of the grounding engine."""

# Copyright (c) 2025 Linus Held. All rights reserved.

from .backend_interface import ChatBackend, DetectorBackend
from .observable_interface import ObservableInterface
from .observer import PipelineObserver
from .stage_interface import StageInterface
from .stage_kind import StageKind

__all__ = [
    "ChatBackend",
    "DetectorBackend",
    "ObservableInterface",
    "PipelineObserver",
    "StageInterface",
    "StageKind",
]
