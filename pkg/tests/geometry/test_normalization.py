import re

import numpy as np
import pytest

from refexp_grounder.geometry import CENTER_SIZE_TOLERANCE, CORNER_TOLERANCE, MIN_EXTENT_CORNER_TOLERANCE, ImageDims, NormalizedBox, PixelBox, denormalize, normalize, round_half_up

THREE_DECIMALS = re.compile(r"^\[\d\.\d{3}, \d\.\d{3}, \d\.\d{3}, \d\.\d{3}\]$")


def test_normalize_known_box():
    box = normalize(PixelBox(0, 0, 160, 120), ImageDims(320, 240))
    assert box.to_tuple() == (0.25, 0.75, 0.5, 0.5)
    assert box.to_text() == "[0.250, 0.750, 0.500, 0.500]"


def test_normalize_uses_bottom_left_origin():
    """A box touching the top edge sits in the upper half: center_y > 0.5."""
    dims = ImageDims(640, 480)
    top = normalize(PixelBox(100, 0, 200, 50), dims)
    bottom = normalize(PixelBox(100, 430, 200, 480), dims)
    assert top.center_y > 0.5
    assert bottom.center_y < 0.5


def test_round_half_up_ties_away_from_zero():
    assert round_half_up(0.0125) == 0.013
    assert round_half_up(0.0124) == 0.012


def test_normalize_reports_tiny_extents_as_minimum():
    box = normalize(PixelBox(10, 10, 10.2, 10.2), ImageDims(1000, 1000))
    assert box.width == 0.001
    assert box.height == 0.001


def test_normalize_rejects_box_outside_image():
    with pytest.raises(ValueError, match="exceeds image bounds"):
        normalize(PixelBox(0, 0, 50, 50), ImageDims(40, 40))


def test_normalized_box_validates_ranges():
    with pytest.raises(ValueError, match="center_x"):
        NormalizedBox(1.2, 0.5, 0.1, 0.1)
    with pytest.raises(ValueError, match="width"):
        NormalizedBox(0.5, 0.5, 0.0, 0.1)


def test_normalization_contract_on_random_boxes():
    """Three decimals; center and size within half a step, corners within the corner bound."""
    rng = np.random.default_rng(3)
    for _ in range(1_000):
        dims = ImageDims(int(rng.integers(64, 1000)), int(rng.integers(64, 1000)))
        w = rng.uniform(0.02, 0.9) * dims.width
        h = rng.uniform(0.02, 0.9) * dims.height
        x_min = rng.uniform(1, dims.width - w - 1)
        y_min = rng.uniform(1, dims.height - h - 1)
        box = PixelBox(x_min, y_min, x_min + w, y_min + h)

        norm = normalize(box, dims)
        assert THREE_DECIMALS.match(norm.to_text())
        for value in norm.to_tuple():
            assert round(value, 3) == value

        back = denormalize(norm, dims)
        tol_x = CENTER_SIZE_TOLERANCE * dims.width + 1e-6
        tol_y = CENTER_SIZE_TOLERANCE * dims.height + 1e-6
        assert abs((back.x_min + back.x_max) / 2 - (box.x_min + box.x_max) / 2) <= tol_x
        assert abs((back.y_min + back.y_max) / 2 - (box.y_min + box.y_max) / 2) <= tol_y
        assert abs(back.width - box.width) <= tol_x
        assert abs(back.height - box.height) <= tol_y

        corner_x = CORNER_TOLERANCE * dims.width + 1e-6
        corner_y = CORNER_TOLERANCE * dims.height + 1e-6
        assert abs(back.x_min - box.x_min) <= corner_x
        assert abs(back.x_max - box.x_max) <= corner_x
        assert abs(back.y_min - box.y_min) <= corner_y
        assert abs(back.y_max - box.y_max) <= corner_y


def test_corner_error_adds_center_and_half_size_rounding():
    """Both roundings push x_min the same way, past half a step but within the corner bound."""
    dims = ImageDims(1000, 1000)
    box = PixelBox(100.2, 500, 102.7, 600)
    norm = normalize(box, dims)
    assert norm.to_tuple() == (0.101, 0.45, 0.003, 0.1)

    back = denormalize(norm, dims)
    assert back.x_min == pytest.approx(99.5)
    assert back.x_max == pytest.approx(102.5)
    assert abs(back.x_min - box.x_min) > CENTER_SIZE_TOLERANCE * dims.width
    assert abs(back.x_min - box.x_min) <= CORNER_TOLERANCE * dims.width
    assert back.y_min == pytest.approx(500)
    assert back.y_max == pytest.approx(600)


def test_minimum_extent_corner_bound():
    dims = ImageDims(1000, 1000)
    box = PixelBox(500, 500, 500.4, 500.4)
    back = denormalize(normalize(box, dims), dims)
    for got, want in zip(back.to_list(), box.to_list()):
        assert abs(got - want) <= MIN_EXTENT_CORNER_TOLERANCE * 1000 + 1e-6
