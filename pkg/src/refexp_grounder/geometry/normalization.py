"""Conversion between pixel boxes and the normalized center format.

Pixel boxes use a top-left origin; normalized boxes use a bottom-left origin.
The y-axis flip happens here and nowhere else.
"""

# Copyright (c) 2025 Linus Held. All rights reserved.

from decimal import ROUND_HALF_UP, Decimal

from .boxes import ImageDims, NormalizedBox, PixelBox

_THREE_PLACES = Decimal("0.001")
_MIN_EXTENT = 0.001

# Round-trip bounds, as fractions of the matching image dimension. Center and
# size are each off by at most half a rounding step; a corner adds the center
# error to half the size error. Extents raised to _MIN_EXTENT can move a corner
# by up to a full step.
CENTER_SIZE_TOLERANCE = 0.0005
CORNER_TOLERANCE = 0.00075
MIN_EXTENT_CORNER_TOLERANCE = 0.001


def round_half_up(value: float) -> float:
    """Rounds to three decimals, ties away from zero, on the shortest decimal repr."""
    return float(Decimal(repr(value)).quantize(_THREE_PLACES, rounding=ROUND_HALF_UP))


def normalize(box: PixelBox, dims: ImageDims) -> NormalizedBox:
    """Converts a pixel box into the normalized bottom-left-origin center format.

    Args:
        box (PixelBox): Box in top-left-origin pixels.
        dims (ImageDims): Dimensions of the image containing the box.

    Returns:
        NormalizedBox: `(center_x, center_y, width, height)` as fractions of the
        image, each rounded half-up to three decimals. Widths and heights that
        would round to zero are reported as 0.001.

    Raises:
        ValueError: If the box does not fit within the image.
    """
    if not box.fits_within(dims):
        raise ValueError(f"Box {box.to_list()} exceeds image bounds {dims.width}x{dims.height}.")

    center_x = (box.x_min + box.x_max) / 2.0 / dims.width
    center_y = (dims.height - (box.y_min + box.y_max) / 2.0) / dims.height
    width = box.width / dims.width
    height = box.height / dims.height

    return NormalizedBox(
        center_x=round_half_up(center_x),
        center_y=round_half_up(center_y),
        width=max(_MIN_EXTENT, round_half_up(width)),
        height=max(_MIN_EXTENT, round_half_up(height)),
    )


def denormalize(box: NormalizedBox, dims: ImageDims) -> PixelBox:
    """Inverse of `normalize` up to rounding.

    Coordinates are clamped to the image and rounded to six decimals to drop
    floating-point noise. For a box that went through `normalize`, center and
    size come back within `CENTER_SIZE_TOLERANCE` and every corner within
    `CORNER_TOLERANCE` of the dimension (`MIN_EXTENT_CORNER_TOLERANCE` when
    the extent was below half a rounding step).
    """
    half_w = box.width * dims.width / 2.0
    half_h = box.height * dims.height / 2.0
    center_x = box.center_x * dims.width
    center_y = (1.0 - box.center_y) * dims.height

    x_min = max(0.0, round(center_x - half_w, 6))
    y_min = max(0.0, round(center_y - half_h, 6))
    x_max = min(float(dims.width), round(center_x + half_w, 6))
    y_max = min(float(dims.height), round(center_y + half_h, 6))
    return PixelBox(x_min, y_min, x_max, y_max)
