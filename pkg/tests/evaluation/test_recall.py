import io

import pytest

import refexp_grounder.evaluation.recall as recall_module
from refexp_grounder.errors import SampleError
from refexp_grounder.evaluation import CONDITIONS, RecallRow, condition_boxes, load_dataset, recall_curve, write_recall_table
from refexp_grounder.gateway import Detection
from refexp_grounder.geometry import ImageDims, PixelBox
from refexp_grounder.scenes.generator import generate_scenes


@pytest.fixture(scope="module")
def small_target_records(tmp_path_factory):
    """Ten scenes, one of which has a target below the area threshold."""
    out_dir = tmp_path_factory.mktemp("recall_scenes")
    generate_scenes(out_dir, 10, seed=3, small_target_fraction=0.1)
    return load_dataset(out_dir / "dataset.jsonl")


def rows_by_condition(rows, value):
    return {row.condition: row for row in rows if row.sweep_value == value}


def test_condition_boxes():
    dims = ImageDims(100, 100)
    large = PixelBox(0, 0, 50, 50)
    duplicate = PixelBox(0, 0, 48, 50)
    tiny = PixelBox(60, 60, 64, 64)
    kept = condition_boxes([Detection("cup", tiny), Detection("cup", large), Detection("mug", duplicate)], dims, 0.025, 0.7)

    assert kept["pre_nms"] == [tiny, large, duplicate]
    assert kept["post_nms"] == [large, tiny]
    assert kept["major"] == [large]


def test_small_targets_are_lost_only_by_the_area_filter(small_target_records, oracle_config):
    rows = recall_curve(small_target_records, oracle_config, "max_boxes", [10])
    by_condition = rows_by_condition(rows, 10)

    assert [row.condition for row in rows] == list(CONDITIONS)
    assert by_condition["pre_nms"].recall == 1.0
    assert by_condition["post_nms"].recall == 1.0
    assert by_condition["major"].recall == pytest.approx(0.9)
    assert all(row.n_samples == 10 and row.sweep_kind == "max_boxes" for row in rows)
    assert by_condition["pre_nms"].mean_boxes >= by_condition["post_nms"].mean_boxes > by_condition["major"].mean_boxes


def test_recall_grows_with_the_box_cap(small_target_records, oracle_config):
    values = [1, 2, 3, 10]
    rows = recall_curve(small_target_records, oracle_config, "max_boxes", values)
    recalls = [rows_by_condition(rows, value)["pre_nms"].recall for value in values]
    boxes = [rows_by_condition(rows, value)["pre_nms"].mean_boxes for value in values]

    assert recalls == sorted(recalls)
    assert boxes == sorted(boxes)
    assert rows_by_condition(rows, 1)["pre_nms"].mean_boxes == 1.0


def test_confidence_sweep(scene_set, oracle_config):
    out_dir, _ = scene_set
    records = load_dataset(out_dir / "dataset.jsonl")
    rows = recall_curve(records, oracle_config, "confidence_threshold", [0.1, 0.5])

    assert len(rows) == 2 * len(CONDITIONS)
    assert all(row.recall == 1.0 for row in rows)


@pytest.mark.parametrize(
    "kind, values, message",
    [
        ("iou", [0.5], "Unknown sweep kind"),
        ("max_boxes", [], "at least one value"),
        ("max_boxes", [0], "at least 1"),
    ],
)
def test_invalid_sweeps(scene_set, oracle_config, kind, values, message):
    out_dir, _ = scene_set
    records = load_dataset(out_dir / "dataset.jsonl")
    with pytest.raises(ValueError, match=message):
        recall_curve(records, oracle_config, kind, values)


def test_empty_records(oracle_config):
    with pytest.raises(ValueError, match="at least one record"):
        recall_curve([], oracle_config, "max_boxes", [5])


def test_recall_table_csv():
    stream = io.StringIO()
    write_recall_table([RecallRow("max_boxes", 5, "major", 2.5, 0.75, 4)], stream)
    assert stream.getvalue() == "sweep_kind,sweep_value,condition,mean_boxes,recall,n_samples\nmax_boxes,5,major,2.5,0.75,4\n"


def test_recall_sweep_uses_the_configured_template_directory(scene_set, oracle_config, tmp_path, monkeypatch):
    out_dir, _ = scene_set
    records = load_dataset(out_dir / "dataset.jsonl")[:2]
    (tmp_path / "MLLM_GLOBAL_DESC_PROMPT.txt").write_text("Describe the image briefly.", encoding="utf-8")
    config = oracle_config.with_updates(prompts={"template_dir": str(tmp_path)})

    seen = []
    original = recall_module.generate_global_caption

    def capturing_caption(image, mllm, renderer):
        seen.append(renderer.templates["MLLM_GLOBAL_DESC_PROMPT"])
        return original(image, mllm, renderer)

    monkeypatch.setattr(recall_module, "generate_global_caption", capturing_caption)
    rows = recall_curve(records, config, "max_boxes", [10])

    assert seen == ["Describe the image briefly."] * 2
    assert all(row.recall == 1.0 for row in rows)


def test_recall_sweep_fails_on_an_overridden_prompt_the_model_rejects(scene_set, oracle_config, tmp_path):
    out_dir, _ = scene_set
    records = load_dataset(out_dir / "dataset.jsonl")[:1]
    (tmp_path / "MLLM_GLOBAL_DESC_PROMPT.txt").write_text("Summarize the picture.", encoding="utf-8")
    config = oracle_config.with_updates(prompts={"template_dir": str(tmp_path)})

    with pytest.raises(SampleError, match="does not recognize"):
        recall_curve(records, config, "max_boxes", [10])
