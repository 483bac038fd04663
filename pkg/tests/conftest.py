"""Shared fixtures: synthetic scene sets and hand-built scenes for the oracle stack."""

import numpy as np
import pytest
from PIL import Image

from refexp_grounder.config import RunConfig
from refexp_grounder.evaluation import SampleOutcome
from refexp_grounder.gateway import BackendSet, ImagePayload, OracleDetector, OracleLLM, OracleMLLM
from refexp_grounder.geometry import PixelBox
from refexp_grounder.scenes import LABEL_SYNONYMS, SceneManifest, SceneObject, SceneQuery
from refexp_grounder.scenes.generator import generate_scenes, render_scene


def build_scene(objects, query=None, target=None, width=320, height=240, scene_id="hand"):
    """Builds a manifest from `(object_id, color, label, box)` tuples."""
    scene_objects = [
        SceneObject(object_id=oid, label=label, synonyms=list(LABEL_SYNONYMS.get(label, ())), color=color, attribute_sentence=f"a {color} {label}", box=list(box))
        for oid, color, label, box in objects
    ]
    phrases = ", ".join(obj.attribute_sentence for obj in scene_objects)
    queries = [SceneQuery(text=query, target=target)] if query else []
    return SceneManifest(scene_id=scene_id, width=width, height=height, caption=f"A synthetic scene containing {phrases}.", objects=scene_objects, queries=queries)


@pytest.fixture
def two_chairs():
    """A red and a blue chair plus a green dog; the query targets the red chair."""
    return build_scene(
        [
            ("obj0", "red", "chair", (10, 10, 90, 100)),
            ("obj1", "blue", "chair", (120, 20, 200, 110)),
            ("obj2", "green", "dog", (220, 130, 300, 220)),
        ],
        query="the red chair",
        target="obj0",
    )


@pytest.fixture
def scene_image():
    """Renders a manifest into an ImagePayload."""

    def _render(scene, background="flat"):
        return ImagePayload.from_array(render_scene(scene, background))

    return _render


@pytest.fixture
def scene_writer(tmp_path):
    """Writes a manifest and its PNG into tmp_path and returns the image path."""

    def _write(scene, background="flat"):
        image_path = tmp_path / f"{scene.scene_id}.png"
        Image.fromarray(render_scene(scene, background)).save(image_path, format="PNG")
        scene.to_yaml(tmp_path / f"{scene.scene_id}.yaml")
        return image_path

    return _write


@pytest.fixture
def oracle_backends():
    """Oracle backend trio bound to one manifest."""

    def _backends(scene, describe_mode="attributes", corruption_rate=0.0, seed=0):
        return BackendSet(llm=OracleLLM(scene), mllm=OracleMLLM(scene, describe_mode, corruption_rate, seed), detector=OracleDetector(scene))

    return _backends


@pytest.fixture
def oracle_config():
    return RunConfig(max_workers=2, record_timings=False)


@pytest.fixture(scope="session")
def scene_set(tmp_path_factory):
    """Twelve generated scenes with unambiguous queries."""
    out_dir = tmp_path_factory.mktemp("scenes")
    records = generate_scenes(out_dir, 12, seed=7)
    return out_dir, records


@pytest.fixture
def checkerboard():
    """An (H, W, 3) uint8 checkerboard with 4-pixel tiles."""

    def _make(width=64, height=48):
        ys, xs = np.indices((height, width))
        tiles = ((ys // 4) + (xs // 4)) % 2
        return np.stack([np.where(tiles == 1, 200, 40)] * 3, axis=-1).astype(np.uint8)

    return _make


@pytest.fixture
def make_outcome():
    """Builds a consistent SampleOutcome from its verdict flags."""

    def _make(sample_id, hit=True, recalled=True, rejected=False, steps=2, area=0.1, timings=None, reason=None, split="val", trace="Answer: 1"):
        if rejected:
            predicted, overlap = None, 0.0
            reason = reason or "selector"
        else:
            predicted, overlap = PixelBox(0, 0, 10, 10), (0.8 if hit else 0.2)
        return SampleOutcome(
            sample_id=sample_id,
            split=split,
            query=f"query {sample_id}",
            gt_box=PixelBox(0, 0, 10, 12),
            predicted_box=predicted,
            rejected=rejected,
            rejection_reason=reason if rejected else None,
            iou_with_gt=overlap,
            hit_at_05=hit and not rejected,
            generation_recall_hit=recalled,
            n_candidates=3,
            n_reasoning_steps=steps,
            parse_quality="clean",
            gt_area_fraction=area,
            trace_text=trace,
            stage_timings=dict(timings or {}),
        )

    return _make
