import pytest
from pydantic import ValidationError

from refexp_grounder.errors import ConfigError
from refexp_grounder.geometry import PixelBox
from refexp_grounder.scenes import SceneManifest, manifest_path_for


def test_yaml_round_trip(tmp_path, two_chairs):
    path = tmp_path / "hand.yaml"
    two_chairs.to_yaml(path)
    assert SceneManifest.from_yaml(path) == two_chairs


def test_names_include_synonyms(two_chairs):
    assert two_chairs.object_by_id("obj0").names == ["chair", "seat"]
    assert two_chairs.object_by_id("obj2").names == ["dog", "puppy"]


def test_match_box(two_chairs):
    assert two_chairs.match_box(PixelBox(12, 12, 90, 98)).object_id == "obj0"
    assert two_chairs.match_box(PixelBox(120, 20, 200, 110)).object_id == "obj1"
    assert two_chairs.match_box(PixelBox(10, 10, 50, 50)) is None
    assert two_chairs.match_box(PixelBox(10, 10, 50, 50), min_iou=0.2).object_id == "obj0"
    assert two_chairs.match_box(PixelBox(300, 0, 320, 5)) is None


def test_query_lookup(two_chairs):
    assert two_chairs.query_for_object("obj0") == "the red chair"
    assert two_chairs.query_for_object("obj1") is None
    with pytest.raises(KeyError):
        two_chairs.object_by_id("obj9")


@pytest.mark.parametrize(
    "change, message",
    [
        ({"width": 80}, "exceeds image 80x240"),
        ({"queries": [{"text": "the cat", "target": "obj7"}]}, "unknown object 'obj7'"),
    ],
)
def test_consistency_checks(two_chairs, change, message):
    with pytest.raises(ValidationError, match=message):
        SceneManifest.model_validate({**two_chairs.model_dump(), **change})


def test_duplicate_object_ids(two_chairs):
    data = two_chairs.model_dump()
    data["objects"][1]["object_id"] = "obj0"
    with pytest.raises(ValidationError, match="duplicate object id 'obj0'"):
        SceneManifest.model_validate(data)


def test_from_yaml_errors(tmp_path):
    with pytest.raises(ConfigError, match="Cannot read scene manifest"):
        SceneManifest.from_yaml(tmp_path / "absent.yaml")

    broken = tmp_path / "broken.yaml"
    broken.write_text("scene_id: x\nwidth: 10\n", encoding="utf-8")
    with pytest.raises(ConfigError, match="Invalid scene manifest"):
        SceneManifest.from_yaml(broken)


def test_manifest_path_for():
    assert manifest_path_for("data/scene_0001.png") == manifest_path_for("data/scene_0001.jpg")
    assert manifest_path_for("data/scene_0001.png").name == "scene_0001.yaml"
