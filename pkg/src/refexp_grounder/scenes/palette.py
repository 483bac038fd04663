"""Colors and object categories used by synthetic scenes."""

# Copyright (c) 2025 Linus Held. All rights reserved.

COLOR_RGB: dict[str, tuple[int, int, int]] = {
    "red": (220, 40, 40),
    "green": (40, 160, 60),
    "blue": (40, 80, 220),
    "yellow": (235, 210, 40),
    "white": (250, 250, 250),
    "black": (20, 20, 20),
    "orange": (240, 140, 30),
    "purple": (130, 60, 170),
    "brown": (120, 80, 40),
    "pink": (240, 150, 190),
    "gray": (128, 128, 128),
    "cyan": (40, 200, 210),
}

COLOR_NAMES: tuple[str, ...] = tuple(COLOR_RGB)

# Single-word labels; no synonym doubles as another label or as a color name.
LABEL_SYNONYMS: dict[str, tuple[str, ...]] = {
    "chair": ("seat",),
    "dog": ("puppy",),
    "car": ("vehicle", "automobile"),
    "cup": ("mug",),
    "cat": ("kitten",),
    "laptop": ("computer",),
    "book": (),
    "bottle": (),
    "vase": (),
    "clock": (),
}

BACKGROUND_RGB: tuple[int, int, int] = (205, 195, 175)
CHECKER_RGB: tuple[tuple[int, int, int], tuple[int, int, int]] = ((70, 70, 70), (190, 190, 190))
CHECKER_TILE = 8
