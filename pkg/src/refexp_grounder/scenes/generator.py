"""Deterministic synthetic scenes: flat-color rectangles plus their manifests.

Every scene is a grid of cells holding at most one object each, so objects
never overlap. Within a scene each (color, label) pair occurs once, which makes
"the <color> <label>" an unambiguous referring expression.
"""

# Copyright (c) 2025 Linus Held. All rights reserved.

import logging
import math
from pathlib import Path
from typing import Union

import numpy as np
from PIL import Image

from ..evaluation.dataset import DatasetRecord, write_dataset
from ..geometry import DEFAULT_MIN_AREA_FRACTION, ImageDims, PixelBox
from .manifest import SceneManifest, SceneObject, SceneQuery
from .palette import BACKGROUND_RGB, CHECKER_RGB, CHECKER_TILE, COLOR_NAMES, COLOR_RGB, LABEL_SYNONYMS

logger = logging.getLogger(__name__)

SCENE_SIZES: tuple[tuple[int, int], ...] = ((320, 240), (400, 300), (480, 360))
# (columns, rows); a scene uses the first grid with a cell for every object.
GRIDS: tuple[tuple[int, int], ...] = ((3, 2), (4, 3), (4, 4), (5, 4))
MAX_OBJECTS = GRIDS[-1][0] * GRIDS[-1][1]
DEFAULT_OBJECT_COUNT = (2, 5)
DEFAULT_LABELS_PER_SCENE = 3
BACKGROUNDS = ("flat", "checkerboard")
DATASET_FILE = "dataset.jsonl"

# Side lengths as a fraction of the cell. Regular objects stay above the area
# filter (at least 0.45**2 / 6 of the image on the 3x2 grid), small targets
# below it (at most ~0.3**2 / 6).
_REGULAR_SIDE = (0.45, 0.9)
_SMALL_SIDE = (0.2, 0.3)


def _grid_for(max_objects: int) -> tuple[int, int]:
    return next(grid for grid in GRIDS if grid[0] * grid[1] >= max_objects)


def _regular_side(n_cells: int) -> tuple[float, float]:
    """Side range whose smallest square still clears the area filter on this grid."""
    low, high = _REGULAR_SIDE
    return max(low, math.sqrt(DEFAULT_MIN_AREA_FRACTION * n_cells) + 0.05), high


def _join_phrases(phrases: list[str]) -> str:
    if len(phrases) == 1:
        return phrases[0]
    return f"{', '.join(phrases[:-1])} and {phrases[-1]}"


def _place(rng: np.random.Generator, cell: int, dims: ImageDims, grid: tuple[int, int], small: bool) -> PixelBox:
    """Draws an integer box inside one grid cell."""
    columns, rows = grid
    column, row = cell % columns, cell // columns
    cell_w, cell_h = dims.width / columns, dims.height / rows
    x_lo, x_hi = math.ceil(column * cell_w), math.floor((column + 1) * cell_w)
    y_lo, y_hi = math.ceil(row * cell_h), math.floor((row + 1) * cell_h)

    low, high = _SMALL_SIDE if small else _regular_side(columns * rows)
    width = min(math.ceil(rng.uniform(low, high) * cell_w), x_hi - x_lo)
    height = min(math.ceil(rng.uniform(low, high) * cell_h), y_hi - y_lo)
    x_min = x_lo + int(rng.integers(0, x_hi - x_lo - width + 1))
    y_min = y_lo + int(rng.integers(0, y_hi - y_lo - height + 1))
    return PixelBox(x_min, y_min, x_min + width, y_min + height)


def _check_layout(object_count: tuple[int, int], labels_per_scene: int):
    low, high = object_count
    if not 1 <= low <= high <= MAX_OBJECTS:
        raise ValueError(f"object_count must satisfy 1 <= min <= max <= {MAX_OBJECTS}, got {object_count}.")
    if not 1 <= labels_per_scene <= len(LABEL_SYNONYMS):
        raise ValueError(f"labels_per_scene must lie in [1, {len(LABEL_SYNONYMS)}], got {labels_per_scene}.")
    if high > labels_per_scene * len(COLOR_NAMES):
        raise ValueError(f"{high} objects need more than {labels_per_scene} label(s) to keep every (color, label) pair unique.")


def generate_scene(
    rng: np.random.Generator,
    scene_id: str,
    kind: str = "regular",
    object_count: tuple[int, int] = DEFAULT_OBJECT_COUNT,
    labels_per_scene: int = DEFAULT_LABELS_PER_SCENE,
) -> SceneManifest:
    """Builds the manifest of one scene.

    Args:
        rng (np.random.Generator): Source of all randomness for the scene.
        scene_id (str): Id written into the manifest.
        kind (str): `regular`, `small` (the target covers less than 2.5 % of the
            image) or `no_target` (the query names a color the target's label
            never has in the scene; its decoy object is recorded in the metadata).
        object_count (tuple[int, int]): Inclusive range of the number of objects.
        labels_per_scene (int): Number of distinct labels the objects draw from.

    Returns:
        SceneManifest: The scene with exactly one query.

    Raises:
        ValueError: If the kind is unknown, the layout arguments are out of
            range, or a no-target scene has no color left for its query.
    """
    if kind not in ("regular", "small", "no_target"):
        raise ValueError(f"Unknown scene kind: {kind}")
    _check_layout(object_count, labels_per_scene)

    width, height = SCENE_SIZES[int(rng.integers(len(SCENE_SIZES)))]
    dims = ImageDims(width, height)
    grid = _grid_for(object_count[1])
    labels = list(LABEL_SYNONYMS)
    pool = [labels[i] for i in rng.choice(len(labels), size=labels_per_scene, replace=False)]
    n_objects = int(rng.integers(object_count[0], object_count[1] + 1))
    cells = rng.choice(grid[0] * grid[1], size=n_objects, replace=False)
    target_slot = int(rng.integers(n_objects))

    objects = []
    used_pairs = set()
    for slot, cell in enumerate(cells):
        label = pool[int(rng.integers(len(pool)))]
        free = [color for color in COLOR_NAMES if (color, label) not in used_pairs]
        if not free:
            label = next(name for name in pool if any((color, name) not in used_pairs for color in COLOR_NAMES))
            free = [color for color in COLOR_NAMES if (color, label) not in used_pairs]
        color = free[int(rng.integers(len(free)))]
        used_pairs.add((color, label))
        box = _place(rng, int(cell), dims, grid, small=(kind == "small" and slot == target_slot))
        objects.append(
            SceneObject(
                object_id=f"obj{slot}",
                label=label,
                synonyms=list(LABEL_SYNONYMS[label]),
                color=color,
                attribute_sentence=f"a {color} {label}",
                box=box.to_list(),
            )
        )

    target = objects[target_slot]
    metadata = {"kind": kind, "target_area_fraction": round(target.pixel_box.area / dims.area, 6)}
    if kind == "no_target":
        used_colors = {obj.color for obj in objects}
        absent = [color for color in COLOR_NAMES if color not in used_colors]
        absent = absent or [color for color in COLOR_NAMES if (color, target.label) not in used_pairs]
        if not absent:
            raise ValueError(f"Scene '{scene_id}' uses every color for '{target.label}'; no no-target query is possible.")
        query = SceneQuery(text=f"the {absent[int(rng.integers(len(absent)))]} {target.label}", target=None)
        metadata["decoy"] = target.object_id
    else:
        query = SceneQuery(text=f"the {target.color} {target.label}", target=target.object_id)
    metadata["small_target"] = metadata["target_area_fraction"] < 0.025

    caption = f"A synthetic scene containing {_join_phrases([obj.attribute_sentence for obj in objects])}."
    return SceneManifest(scene_id=scene_id, width=width, height=height, caption=caption, objects=objects, queries=[query], metadata=metadata)


def render_scene(scene: SceneManifest, background: str = "flat") -> np.ndarray:
    """Rasterizes a manifest into an `(H, W, 3)` uint8 RGB array.

    Raises:
        ValueError: If the background is unknown.
    """
    if background == "flat":
        pixels = np.empty((scene.height, scene.width, 3), dtype=np.uint8)
        pixels[:, :] = BACKGROUND_RGB
    elif background == "checkerboard":
        ys, xs = np.indices((scene.height, scene.width))
        tiles = ((ys // CHECKER_TILE) + (xs // CHECKER_TILE)) % 2
        pixels = np.asarray(CHECKER_RGB, dtype=np.uint8)[tiles]
    else:
        raise ValueError(f"Unknown background: {background}. Expected one of {', '.join(BACKGROUNDS)}.")

    for obj in scene.objects:
        x_min, y_min, x_max, y_max = (int(v) for v in obj.box)
        pixels[y_min:y_max, x_min:x_max] = COLOR_RGB[obj.color]
    return pixels


def _scene_kinds(n_scenes: int, seed: int, no_target_fraction: float, small_target_fraction: float) -> list[str]:
    n_none = round(no_target_fraction * n_scenes)
    n_small = round(small_target_fraction * n_scenes)
    if n_none + n_small > n_scenes:
        raise ValueError("no_target_fraction and small_target_fraction together exceed the number of scenes.")
    kinds = ["regular"] * n_scenes
    order = np.random.default_rng(seed).permutation(n_scenes)
    for position, index in enumerate(order[: n_none + n_small]):
        kinds[int(index)] = "no_target" if position < n_none else "small"
    return kinds


def generate_scenes(
    out_dir: Union[str, Path],
    n_scenes: int,
    seed: int = 0,
    no_target_fraction: float = 0.0,
    small_target_fraction: float = 0.0,
    background: str = "flat",
    split: str = "synthetic",
    object_count: tuple[int, int] = DEFAULT_OBJECT_COUNT,
    labels_per_scene: int = DEFAULT_LABELS_PER_SCENE,
) -> list[DatasetRecord]:
    """Writes `scene_XXXX.png`, `scene_XXXX.yaml` and `dataset.jsonl` into `out_dir`.

    The fractions are turned into exact scene counts (rounded). Outputs are
    byte-identical for equal arguments. No-target samples carry the decoy's
    box as `gt_box` so the dataset stays well-formed.

    Args:
        out_dir (Union[str, Path]): Output directory, created if missing.
        n_scenes (int): Number of scenes.
        seed (int): Seed of the whole set.
        no_target_fraction (float): Share of scenes whose query matches nothing.
        small_target_fraction (float): Share of scenes whose target covers less
            than 2.5 % of the image.
        background (str): `flat` or `checkerboard`.
        split (str): Split name written into the dataset.
        object_count (tuple[int, int]): Inclusive range of objects per scene;
            raise it for crowded scenes with more candidates than primaries.
        labels_per_scene (int): Number of distinct labels per scene.

    Returns:
        list[DatasetRecord]: The dataset records, with image paths relative to
            `out_dir`.

    Raises:
        ValueError: If n_scenes is below 1, the fractions are out of range or
            the layout arguments are invalid.
    """
    if n_scenes < 1:
        raise ValueError(f"n_scenes must be at least 1, got {n_scenes}.")
    for name, value in (("no_target_fraction", no_target_fraction), ("small_target_fraction", small_target_fraction)):
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"{name} must lie in [0, 1], got {value}.")
    _check_layout(object_count, labels_per_scene)

    out_path = Path(out_dir)
    out_path.mkdir(parents=True, exist_ok=True)
    kinds = _scene_kinds(n_scenes, seed, no_target_fraction, small_target_fraction)

    records = []
    for index, kind in enumerate(kinds):
        scene_id = f"scene_{index:04d}"
        scene = generate_scene(np.random.default_rng([seed, index]), scene_id, kind, object_count, labels_per_scene)
        Image.fromarray(render_scene(scene, background)).save(out_path / f"{scene_id}.png", format="PNG")
        scene.to_yaml(out_path / f"{scene_id}.yaml")

        query = scene.queries[0]
        gt_object = scene.object_by_id(query.target if query.target is not None else str(scene.metadata["decoy"]))
        records.append(DatasetRecord(scene_id, f"{scene_id}.png", query.text, gt_object.pixel_box, split))

    write_dataset(records, out_path / DATASET_FILE)
    logger.info("Generated %d scenes in %s", n_scenes, out_path)
    return records
