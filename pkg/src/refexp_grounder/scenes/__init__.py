"""Synthetic scenes: manifests and palette.

The raster and dataset generator lives in `refexp_grounder.scenes.generator`;
it is not imported here because the oracle backends load this package.
"""

# Copyright (c) 2025 Linus Held. All rights reserved.

from .manifest import SceneManifest, SceneObject, SceneQuery, manifest_path_for
from .palette import BACKGROUND_RGB, COLOR_NAMES, COLOR_RGB, LABEL_SYNONYMS

__all__ = ["BACKGROUND_RGB", "COLOR_NAMES", "COLOR_RGB", "LABEL_SYNONYMS", "SceneManifest", "SceneObject", "SceneQuery", "manifest_path_for"]
