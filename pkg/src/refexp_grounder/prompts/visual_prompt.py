"""Raster visual prompts: a colored outline around the candidate on a blurred background."""

# Copyright (c) 2025 Linus Held. All rights reserved.

import math
from dataclasses import dataclass

import cv2
import numpy as np

from ..gateway.messages import ImagePayload
from ..geometry import PixelBox


@dataclass(frozen=True)
class VisualPromptSpec:
    """Appearance of the candidate marker.

    Attributes:
        outline_color (tuple[int, int, int]): RGB color of the outline.
        outline_width (int): Outline thickness in pixels, growing outward from the box edge.
        blur_sigma (float): Standard deviation of the background Gaussian blur.
    """

    outline_color: tuple[int, int, int] = (255, 0, 0)
    outline_width: int = 3
    blur_sigma: float = 10.0

    def __post_init__(self):
        if len(self.outline_color) != 3 or any(not 0 <= int(c) <= 255 for c in self.outline_color):
            raise ValueError(f"outline_color must be an RGB triple in [0, 255], got {self.outline_color}.")
        if self.outline_width < 1:
            raise ValueError(f"outline_width must be positive, got {self.outline_width}.")
        if self.blur_sigma <= 0:
            raise ValueError(f"blur_sigma must be positive, got {self.blur_sigma}.")

    @property
    def kernel_size(self) -> int:
        """Odd kernel size truncating the Gaussian at three sigma."""
        return 2 * math.ceil(3 * self.blur_sigma) + 1


def outline_ring(box: PixelBox) -> tuple[int, int, int, int]:
    """Integer pixel ring `(x0, y0, x1, y1)` on the box boundary, inclusive on all sides."""
    return (math.floor(box.x_min), math.floor(box.y_min), math.ceil(box.x_max) - 1, math.ceil(box.y_max) - 1)


def render_visual_prompt_image(image: ImagePayload, box: PixelBox, spec: VisualPromptSpec = VisualPromptSpec()) -> ImagePayload:
    """Marks a candidate region for the describer.

    Pixels strictly inside the outline ring keep their original values, the ring
    and `outline_width - 1` pixels outward are painted with the outline color,
    and everything else is Gaussian-blurred with replicated borders.

    Args:
        image (ImagePayload): Source image.
        box (PixelBox): Candidate region in pixels.
        spec (VisualPromptSpec): Marker appearance.

    Returns:
        ImagePayload: PNG image with the same dimensions as the source.

    Raises:
        ValueError: If the box does not fit within the image.
    """
    if not box.fits_within(image.dims):
        raise ValueError(f"Box {box.to_list()} exceeds image bounds {image.dims.width}x{image.dims.height}.")

    source = image.to_array()
    k = spec.kernel_size
    marked = cv2.GaussianBlur(source, (k, k), sigmaX=spec.blur_sigma, sigmaY=spec.blur_sigma, borderType=cv2.BORDER_REPLICATE)
    marked = np.ascontiguousarray(marked)

    x0, y0, x1, y1 = outline_ring(box)
    marked[y0 + 1 : y1, x0 + 1 : x1] = source[y0 + 1 : y1, x0 + 1 : x1]

    color = tuple(int(c) for c in spec.outline_color)
    for offset in range(spec.outline_width):
        cv2.rectangle(marked, (x0 - offset, y0 - offset), (x1 + offset, y1 + offset), color, thickness=1)

    return ImagePayload.from_array(marked, fmt="png")
