"""Training-free visual grounding engine. Exposes the system orchestrators and configuration."""

# Copyright (c) 2025 Linus Held. All rights reserved.

from .config import RunConfig, load_config
from .grounding_system import GroundingSystem
from .system_base import SystemBase

__all__ = ["GroundingSystem", "RunConfig", "SystemBase", "load_config"]

__version__ = "0.1.0"
