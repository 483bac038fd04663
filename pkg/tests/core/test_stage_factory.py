import pytest

from refexp_grounder.core import CaptionStage, DescriptionStage, PipelineBlock, SelectionStage, StageFactory
from refexp_grounder.prompts import PromptRenderer


def test_factory_rebuilds_nested_layout():
    original = PipelineBlock(
        "Grounding",
        [CaptionStage(), PipelineBlock("Inner", [DescriptionStage(self_consistency_n=3, substitution="query_echo")]), SelectionStage(["none"], 2)],
        record_timings=False,
    )

    rebuilt = StageFactory.from_dict(original.to_dict())

    assert isinstance(rebuilt, PipelineBlock)
    assert rebuilt.to_dict() == original.to_dict()
    assert isinstance(rebuilt.stages[1].stages[0], DescriptionStage)


def test_factory_shares_the_renderer():
    renderer = PromptRenderer()
    block = StageFactory.from_dict({"type": "PipelineBlock", "name": "p", "stages": [{"type": "CaptionStage"}, {"type": "DetectionStage"}, {"type": "SelectionStage"}]}, renderer)
    assert block.stages[0].renderer is renderer
    assert block.stages[2].renderer is renderer


def test_factory_unknown_type():
    with pytest.raises(ValueError, match="Unknown stage type: WarpStage"):
        StageFactory.from_dict({"type": "WarpStage"})
    with pytest.raises(ValueError, match="Unknown stage type: None"):
        StageFactory.from_dict({})


def test_factory_invalid_parameters():
    with pytest.raises(ValueError, match="Invalid parameters for RefinementStage"):
        StageFactory.from_dict({"type": "RefinementStage", "min_area": 0.1})
