import json
import logging

import pytest

from refexp_grounder.errors import ReportIOError
from refexp_grounder.evaluation import convert_referring_annotations, load_dataset
from refexp_grounder.geometry import PixelBox


@pytest.fixture
def annotations(tmp_path):
    data = {
        "images": [{"id": 1, "file_name": "beach.jpg"}],
        "annotations": [{"id": 10, "bbox": [5, 6, 20, 10]}, {"id": 11, "bbox": [3, 3, 0, 4]}],
        "refs": [
            {"ref_id": 100, "ann_id": 10, "image_id": 1, "split": "val", "sentences": [{"sent": "left man"}, {"sent": "  "}, {"sent": " man in red "}]},
            {"ref_id": 101, "ann_id": 11, "image_id": 1, "split": "val", "sentences": [{"sent": "nothing"}]},
            {"ref_id": 102, "ann_id": 10, "image_id": 99, "split": "val", "sentences": [{"sent": "lost"}]},
            {"ref_id": 103, "ann_id": 10, "image_id": 1, "split": "test", "sentences": ["the man"]},
        ],
    }
    path = tmp_path / "refs.json"
    path.write_text(json.dumps(data), encoding="utf-8")
    return path


def test_converts_xywh_boxes_per_sentence(tmp_path, annotations, caplog):
    out = tmp_path / "refs.jsonl"
    with caplog.at_level(logging.WARNING, logger="refexp_grounder"):
        records = convert_referring_annotations(annotations, tmp_path / "images", out)

    assert [(r.sample_id, r.query, r.split) for r in records] == [("100_0", "left man", "val"), ("100_2", "man in red", "val"), ("103_0", "the man", "test")]
    assert all(r.gt_box == PixelBox(5, 6, 25, 16) for r in records)
    assert records[0].image_path == str(tmp_path / "images" / "beach.jpg")
    assert "Skipped 2 ref(s)" in caplog.text
    assert load_dataset(out, check_images=False) == records


def test_split_filter(tmp_path, annotations):
    records = convert_referring_annotations(annotations, tmp_path, tmp_path / "test.jsonl", split="test")
    assert [r.sample_id for r in records] == ["103_0"]


def test_unreadable_annotations(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("[", encoding="utf-8")
    with pytest.raises(ReportIOError, match="Cannot read annotations"):
        convert_referring_annotations(bad, tmp_path, tmp_path / "out.jsonl")
