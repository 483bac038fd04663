"""Immutable box and image-dimension value types."""

# Copyright (c) 2025 Linus Held. All rights reserved.

from dataclasses import dataclass


@dataclass(frozen=True)
class ImageDims:
    """Pixel dimensions of a raster image.

    Attributes:
        width (int): Image width in pixels (>= 1).
        height (int): Image height in pixels (>= 1).
    """

    width: int
    height: int

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError(f"Image dimensions must be positive, got {self.width}x{self.height}.")

    @property
    def area(self) -> int:
        return self.width * self.height

    def to_list(self) -> list[int]:
        return [self.width, self.height]


@dataclass(frozen=True)
class PixelBox:
    """Axis-aligned box in detector-native pixel coordinates.

    The origin is the image top-left corner and y grows downward.

    Attributes:
        x_min (float): Left edge.
        y_min (float): Top edge.
        x_max (float): Right edge, strictly greater than x_min.
        y_max (float): Bottom edge, strictly greater than y_min.
    """

    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self):
        if min(self.x_min, self.y_min, self.x_max, self.y_max) < 0:
            raise ValueError(f"Box coordinates must be non-negative, got {self.to_list()}.")
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError(f"Box must satisfy x_min < x_max and y_min < y_max, got {self.to_list()}.")

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    @property
    def area(self) -> float:
        return self.width * self.height

    def fits_within(self, dims: ImageDims) -> bool:
        """Checks whether the box lies inside the image bounds.

        Args:
            dims (ImageDims): The image the box should belong to.

        Returns:
            bool: True if every edge lies within [0, width] x [0, height].
        """
        return self.x_max <= dims.width and self.y_max <= dims.height

    def to_list(self) -> list[float]:
        return [self.x_min, self.y_min, self.x_max, self.y_max]

    @classmethod
    def from_list(cls, values: list[float]) -> "PixelBox":
        """Builds a box from an `[x_min, y_min, x_max, y_max]` sequence.

        Raises:
            ValueError: If the sequence does not hold exactly four numbers or
                the coordinates violate the box invariants.
        """
        if len(values) != 4:
            raise ValueError(f"A box needs exactly 4 coordinates, got {len(values)}.")
        return cls(*(float(v) for v in values))


@dataclass(frozen=True)
class NormalizedBox:
    """Center-format box relative to the image, with a bottom-left origin.

    All four fields are fractions of the image dimensions rounded to three
    decimal places. A larger `center_y` means the box sits higher in the image.
    """

    center_x: float
    center_y: float
    width: float
    height: float

    def __post_init__(self):
        for field_name in ("center_x", "center_y"):
            value = getattr(self, field_name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{field_name} must lie in [0, 1], got {value}.")
        for field_name in ("width", "height"):
            value = getattr(self, field_name)
            if not 0.0 < value <= 1.0:
                raise ValueError(f"{field_name} must lie in (0, 1], got {value}.")

    def to_tuple(self) -> tuple[float, float, float, float]:
        return (self.center_x, self.center_y, self.width, self.height)

    def to_text(self) -> str:
        """Renders the box as `[cx, cy, w, h]` with exactly three decimals per field."""
        return "[" + ", ".join(f"{value:.3f}" for value in self.to_tuple()) + "]"
