"""Score-free box algebra: IoU, area filtering, area-priority NMS and sorting."""

# Copyright (c) 2025 Linus Held. All rights reserved.

import numpy as np

from .boxes import ImageDims, PixelBox

DEFAULT_MIN_AREA_FRACTION = 0.025
DEFAULT_NMS_IOU = 0.7


def iou(a: PixelBox, b: PixelBox) -> float:
    """Computes the Intersection-over-Union of two boxes.

    Args:
        a (PixelBox): First box.
        b (PixelBox): Second box.

    Returns:
        float: Intersection area divided by union area, 0.0 for disjoint boxes.
    """
    inter_w = max(0.0, min(a.x_max, b.x_max) - max(a.x_min, b.x_min))
    inter_h = max(0.0, min(a.y_max, b.y_max) - max(a.y_min, b.y_min))
    inter = inter_w * inter_h
    if inter == 0.0:
        return 0.0
    return inter / (a.area + b.area - inter)


def area_fraction(box: PixelBox, dims: ImageDims) -> float:
    """Returns the share of the image area covered by a box.

    Args:
        box (PixelBox): The box to measure.
        dims (ImageDims): Dimensions of the image the box belongs to.

    Returns:
        float: `box.area / (width * height)`, in (0, 1].

    Raises:
        ValueError: If the box extends beyond the image, which indicates
            malformed detector output.
    """
    if not box.fits_within(dims):
        raise ValueError(f"Box {box.to_list()} exceeds image bounds {dims.width}x{dims.height}.")
    return box.area / dims.area


def filter_by_area(boxes: list[PixelBox], dims: ImageDims, min_fraction: float = DEFAULT_MIN_AREA_FRACTION) -> list[PixelBox]:
    """Drops boxes covering less than `min_fraction` of the image.

    The boundary is inclusive: a box at exactly `min_fraction` survives.
    Input order is preserved.

    Raises:
        ValueError: If `min_fraction` lies outside [0, 1).
    """
    if not 0.0 <= min_fraction < 1.0:
        raise ValueError(f"min_fraction must lie in [0, 1), got {min_fraction}.")
    return [box for box in boxes if area_fraction(box, dims) >= min_fraction]


def sort_by_area_desc(boxes: list[PixelBox]) -> list[PixelBox]:
    """Stable sort, largest area first; equal areas keep their input order."""
    return sorted(boxes, key=lambda box: -box.area)


def _as_array(boxes: list[PixelBox]) -> np.ndarray:
    return np.array([box.to_list() for box in boxes], dtype=np.float64).reshape(-1, 4)


def nms_indices(boxes: list[PixelBox], iou_threshold: float = DEFAULT_NMS_IOU) -> list[int]:
    """Greedy non-maximum suppression using box area as the priority score.

    Args:
        boxes (list[PixelBox]): Candidate boxes in any order.
        iou_threshold (float): A box is suppressed when its IoU with an already
            kept box exceeds this value. Must lie in (0, 1].

    Returns:
        list[int]: Indices into `boxes` of the survivors, ordered by descending
        area (ties in input order).

    Raises:
        ValueError: If the threshold lies outside (0, 1].
    """
    if not 0.0 < iou_threshold <= 1.0:
        raise ValueError(f"iou_threshold must lie in (0, 1], got {iou_threshold}.")
    if not boxes:
        return []

    coords = _as_array(boxes)
    x1, y1, x2, y2 = coords[:, 0], coords[:, 1], coords[:, 2], coords[:, 3]
    areas = (x2 - x1) * (y2 - y1)
    order = np.argsort(-areas, kind="stable")

    keep = []
    while order.size > 0:
        i = order[0]
        keep.append(int(i))
        rest = order[1:]
        inter_w = np.maximum(0.0, np.minimum(x2[i], x2[rest]) - np.maximum(x1[i], x1[rest]))
        inter_h = np.maximum(0.0, np.minimum(y2[i], y2[rest]) - np.maximum(y1[i], y1[rest]))
        inter = inter_w * inter_h
        overlap = np.where(inter == 0.0, 0.0, inter / (areas[i] + areas[rest] - inter))
        order = rest[overlap <= iou_threshold]

    return keep


def nms(boxes: list[PixelBox], iou_threshold: float = DEFAULT_NMS_IOU) -> list[PixelBox]:
    """Area-priority NMS returning the surviving boxes, largest first."""
    return [boxes[i] for i in nms_indices(boxes, iou_threshold)]
