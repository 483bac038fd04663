from refexp_grounder import GroundingSystem, RunConfig
from refexp_grounder.core import GroundingContext, ObservableStage
from refexp_grounder.visualization import TraceVisualizer


def trace_run(scene, query, scene_image, oracle_backends):
    system = GroundingSystem(RunConfig(record_timings=False))
    visualizer = TraceVisualizer("trace_test")
    runner = ObservableStage(system.system_layout)
    runner.attach(visualizer)
    final = runner.run(GroundingContext(scene_image(scene), query, oracle_backends(scene)))
    return visualizer.dot.source, final


def test_stages_are_chained(two_chairs, scene_image, oracle_backends):
    source, _ = trace_run(two_chairs, "the red chair", scene_image, oracle_backends)

    for first, second in [("caption", "concepts"), ("concepts", "detection"), ("detection", "refinement"), ("refinement", "description"), ("description", "selection")]:
        assert f"stage_{first} -> stage_{second}" in source
    assert "2 candidates" in source
    assert "2 described" in source
    assert "cluster_candidates" in source


def test_selected_candidate_is_highlighted(two_chairs, scene_image, oracle_backends):
    source, final = trace_run(two_chairs, "the red chair", scene_image, oracle_backends)
    answer = final.trace.answer

    assert f"answer {answer} (2 steps, clean)" in source
    assert f"stage_selection -> cand_{answer} [color=red]" in source
    assert "rejected [" not in source


def test_rejection_adds_a_terminal_node(two_chairs, scene_image, oracle_backends):
    source, final = trace_run(two_chairs, "the purple chair", scene_image, oracle_backends)

    assert final.trace.rejected
    assert 'rejected [label="no match"' in source
    assert "stage_selection -> rejected [color=red]" in source
