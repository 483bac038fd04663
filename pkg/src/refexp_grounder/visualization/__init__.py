"""Visualization observers for grounding runs."""

# Copyright (c) 2025 Linus Held. All rights reserved.

from .trace_visualizer import TraceVisualizer

__all__ = ["TraceVisualizer"]
