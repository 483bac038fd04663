"""Command-line entry point: grounding, benchmarks, recall curves, scenes and cassettes."""

# Copyright (c) 2025 Linus Held. All rights reserved.

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional

from .config import RunConfig, load_config
from .errors import GroundingError
from .evaluation import (
    SWEEP_KINDS,
    convert_referring_annotations,
    load_dataset,
    recall_by_gt_area,
    recall_curve,
    run_benchmark,
    summarize_runs,
    write_recall_table,
    write_report,
)
from .gateway import BackendProvider, ImagePayload
from .grounding_system import ABLATION_MODES, GroundingSystem
from .logging_utils import setup_logging
from .scenes.generator import BACKGROUNDS, DATASET_FILE, DEFAULT_LABELS_PER_SCENE, DEFAULT_OBJECT_COUNT, MAX_OBJECTS, generate_scenes

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_REJECTED = 2


def _format_box(values) -> str:
    return "[" + ", ".join(f"{v:g}" if isinstance(v, float) else str(v) for v in values) + "]"


def _run_config(args: argparse.Namespace) -> RunConfig:
    """Loads the configuration and applies command-line overrides."""
    config = load_config(args.config) if args.config else RunConfig()
    seed = getattr(args, "seed", None)
    if seed is not None:
        config = config.with_updates(seed=seed, oracle={**config.oracle.model_dump(), "seed": seed})
    return config


def _checkpoint_for(report_path: Path) -> Path:
    return report_path.with_suffix(".partial.jsonl")


def _print_summary(report):
    print(f"accuracy={report.accuracy:.4f} recall={report.generation_recall:.4f} rejection={report.rejection_rate:.4f}")


def cmd_ground(args: argparse.Namespace) -> int:
    """Grounds one query and prints box, rejection flag and reasoning trace."""
    config = _run_config(args)
    provider = BackendProvider(config)
    system = GroundingSystem(config, layout_path=args.layout)
    image = ImagePayload.from_path(args.image)
    backends = provider.for_image(args.image)

    if args.graph:
        result = system.generate_graph(image, args.query, backends, filename=args.graph)
    else:
        result = system.ground(image, args.query, backends)

    if result.rejected:
        print("box_pixel=none")
        print("box_normalized=none")
        print(f"rejected=true reason={result.rejection_reason.value}")
    else:
        print(f"box_pixel={_format_box(result.predicted_box.to_list())}")
        print(f"box_normalized={_format_box(result.predicted_norm_box.to_tuple())}")
        print("rejected=false")
    print("trace:")
    print(result.trace.raw_text)
    return EXIT_REJECTED if result.rejected else EXIT_OK


def _bench(args: argparse.Namespace, config: RunConfig) -> int:
    if args.repeats < 1:
        raise ValueError(f"--repeats must be at least 1, got {args.repeats}.")
    records = load_dataset(args.dataset)
    report_path = Path(args.report)

    if args.repeats == 1:
        checkpoint = _checkpoint_for(report_path)
        run = run_benchmark(records, config, mode=args.mode, checkpoint_path=checkpoint, resume=args.resume, show_progress=args.progress)
        write_report(run.report, run.outcomes, report_path)
        checkpoint.unlink(missing_ok=True)
        _print_summary(run.report)
        for row in recall_by_gt_area(run.outcomes):
            if row.recall is not None:
                logger.info("recall for gt area < %.2f: %.4f over %d sample(s)", row.beta, row.recall, row.n_samples)
        return EXIT_OK

    reports = []
    for repeat in range(args.repeats):
        seed = config.seed + repeat
        repeat_config = config.with_updates(seed=seed, oracle={**config.oracle.model_dump(), "seed": seed})
        run = run_benchmark(records, repeat_config, mode=args.mode, show_progress=args.progress)
        write_report(run.report, run.outcomes, report_path.with_name(f"{report_path.stem}.run{repeat}{report_path.suffix}"))
        _print_summary(run.report)
        reports.append(run.report)
    summary = summarize_runs(reports)
    print(f"runs={summary.n_runs} mean_accuracy={summary.mean_accuracy:.4f} std_accuracy={summary.std_accuracy:.4f}")
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    """Benchmarks the pipeline (or an ablation mode) on a dataset."""
    return _bench(args, _run_config(args))


def _cassette_path(args: argparse.Namespace) -> str:
    return args.cassette or str(Path(args.report).with_suffix(".cassette.jsonl"))


def cmd_record(args: argparse.Namespace) -> int:
    """Benchmarks while recording every model call to a cassette."""
    config = _run_config(args).with_updates(cassette={"mode": "record", "path": _cassette_path(args), "strict": True}, record_timings=False)
    return _bench(args, config)


def cmd_replay(args: argparse.Namespace) -> int:
    """Benchmarks strictly from a cassette; no backend is contacted."""
    config = _run_config(args).with_updates(cassette={"mode": "replay", "path": _cassette_path(args), "strict": True}, record_timings=False)
    return _bench(args, config)


def parse_sweep(spec: str) -> tuple[str, list[float]]:
    """Parses `kind=v1,v2,...` into the sweep kind and its values.

    Raises:
        ValueError: If the kind is unknown or a value is not a number.
    """
    kind, _, raw_values = spec.partition("=")
    kind = kind.strip()
    if kind not in SWEEP_KINDS or not raw_values.strip():
        raise ValueError(f"Invalid sweep '{spec}'. Expected <kind>=<v1>,<v2>,... with kind in {', '.join(SWEEP_KINDS)}.")
    try:
        values = [float(v) for v in raw_values.split(",") if v.strip()]
    except ValueError as exc:
        raise ValueError(f"Invalid sweep value in '{spec}'.") from exc
    return kind, values


def cmd_recall(args: argparse.Namespace) -> int:
    """Emits the candidate-generation recall curve as CSV."""
    config = _run_config(args)
    kind, values = parse_sweep(args.sweep)
    rows = recall_curve(load_dataset(args.dataset), config, kind, values)
    if args.report:
        with open(args.report, "w", encoding="utf-8", newline="") as f:
            write_recall_table(rows, f)
    else:
        write_recall_table(rows, sys.stdout)
    return EXIT_OK


def cmd_gen_scenes(args: argparse.Namespace) -> int:
    """Generates synthetic scenes, their manifests and a dataset file."""
    records = generate_scenes(
        args.out_dir,
        args.n_scenes,
        args.seed,
        args.no_target_fraction,
        args.small_target_fraction,
        args.background,
        object_count=(args.min_objects, args.max_objects),
        labels_per_scene=args.labels_per_scene,
    )
    print(f"scenes={len(records)} dataset={Path(args.out_dir) / DATASET_FILE}")
    return EXIT_OK


def cmd_convert_refs(args: argparse.Namespace) -> int:
    """Converts COCO-style referring annotations into a dataset file."""
    records = convert_referring_annotations(args.annotations, args.image_dir, args.out, args.split)
    print(f"records={len(records)} dataset={args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="refexp-grounder", description="Training-free visual grounding and referring-expression benchmarks.")
    parser.add_argument("--log-level", default="WARNING", help="Logging level (default: WARNING).")
    commands = parser.add_subparsers(dest="command", required=True)

    ground = commands.add_parser("ground", help="Ground one referring expression in an image.")
    ground.add_argument("image")
    ground.add_argument("query")
    ground.add_argument("--config")
    ground.add_argument("--seed", type=int)
    ground.add_argument("--layout", help="Stage layout file (.json, .yaml or .yml) replacing the configured layout.")
    ground.add_argument("--graph", help="Render the run as a Graphviz diagram to this path (without extension).")
    ground.set_defaults(handler=cmd_ground)

    def add_bench_arguments(sub: argparse.ArgumentParser):
        sub.add_argument("dataset")
        sub.add_argument("--config")
        sub.add_argument("--report", required=True, help="Report file (.jsonl or .csv).")
        sub.add_argument("--mode", choices=ABLATION_MODES, default="caption")
        sub.add_argument("--seed", type=int)
        sub.add_argument("--resume", action="store_true", help="Skip samples already in the checkpoint file.")
        sub.add_argument("--repeats", type=int, default=1, help="Run the benchmark N times with consecutive seeds.")
        sub.add_argument("--progress", action="store_true", help="Show a progress bar.")

    bench = commands.add_parser("bench", help="Benchmark a dataset.")
    add_bench_arguments(bench)
    bench.set_defaults(handler=cmd_bench)

    record = commands.add_parser("record", help="Benchmark and record all model calls to a cassette.")
    add_bench_arguments(record)
    record.add_argument("--cassette", help="Cassette file (default: next to the report).")
    record.set_defaults(handler=cmd_record)

    replay = commands.add_parser("replay", help="Benchmark strictly from a recorded cassette.")
    add_bench_arguments(replay)
    replay.add_argument("--cassette", help="Cassette file (default: next to the report).")
    replay.set_defaults(handler=cmd_replay)

    recall = commands.add_parser("recall", help="Candidate-generation recall curve.")
    recall.add_argument("dataset")
    recall.add_argument("--config")
    recall.add_argument("--seed", type=int)
    recall.add_argument("--sweep", required=True, help="Sweep spec, e.g. confidence_threshold=0.1,0.3,0.5 or max_boxes=5,10,20.")
    recall.add_argument("--report", help="CSV output file (default: stdout).")
    recall.set_defaults(handler=cmd_recall)

    gen = commands.add_parser("gen-scenes", help="Generate synthetic scenes and a dataset file.")
    gen.add_argument("out_dir")
    gen.add_argument("--n-scenes", type=int, default=10)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--no-target-fraction", type=float, default=0.0)
    gen.add_argument("--small-target-fraction", type=float, default=0.0)
    gen.add_argument("--background", choices=BACKGROUNDS, default="flat")
    gen.add_argument("--min-objects", type=int, default=DEFAULT_OBJECT_COUNT[0])
    gen.add_argument("--max-objects", type=int, default=DEFAULT_OBJECT_COUNT[1], help=f"At most {MAX_OBJECTS}; above 10 scenes can hold more candidates than primaries.")
    gen.add_argument("--labels-per-scene", type=int, default=DEFAULT_LABELS_PER_SCENE)
    gen.set_defaults(handler=cmd_gen_scenes)

    convert = commands.add_parser("convert-refs", help="Convert COCO-style referring annotations into a dataset file.")
    convert.add_argument("annotations")
    convert.add_argument("--image-dir", required=True)
    convert.add_argument("--out", required=True)
    convert.add_argument("--split")
    convert.set_defaults(handler=cmd_convert_refs)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    """Runs the command line.

    Returns:
        int: 0 on success, 1 on error, 2 when `ground` rejects the query.
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        setup_logging(args.log_level)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR

    try:
        return args.handler(args)
    except (GroundingError, OSError, ValueError) as exc:
        logger.debug("Command %s failed", args.command, exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
