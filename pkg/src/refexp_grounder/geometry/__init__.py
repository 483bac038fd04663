"""Box value types and pure box algebra."""

# Copyright (c) 2025 Linus Held. All rights reserved.

from .boxes import ImageDims, NormalizedBox, PixelBox
from .normalization import CENTER_SIZE_TOLERANCE, CORNER_TOLERANCE, MIN_EXTENT_CORNER_TOLERANCE, denormalize, normalize, round_half_up
from .ops import DEFAULT_MIN_AREA_FRACTION, DEFAULT_NMS_IOU, area_fraction, filter_by_area, iou, nms, nms_indices, sort_by_area_desc

__all__ = [
    "CENTER_SIZE_TOLERANCE",
    "CORNER_TOLERANCE",
    "DEFAULT_MIN_AREA_FRACTION",
    "DEFAULT_NMS_IOU",
    "ImageDims",
    "MIN_EXTENT_CORNER_TOLERANCE",
    "NormalizedBox",
    "PixelBox",
    "area_fraction",
    "denormalize",
    "filter_by_area",
    "iou",
    "nms",
    "nms_indices",
    "normalize",
    "round_half_up",
    "sort_by_area_desc",
]
