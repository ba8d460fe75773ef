"""Command-line entry point: plan -> generate -> evaluate -> analyze.

Each stage hands off through files under the output directory (plan.json,
images/, predictions.csv, reports/), so long runs are restartable and every
stage is independently inspectable.

Exit codes: 0 success, 2 configuration/argument error, 3 missing stage input,
1 internal failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import analysis, dataset, inference
from .imaging import DEFAULT_CUTOFFS

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_CONFIG = 2
EXIT_MISSING = 3


class MissingInputError(Exception):
    """A required prior-stage artifact does not exist."""


def _parse_cutoffs(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad cutoff list: {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("cutoff list is empty")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hybridbench",
        description="Blend image pairs across a cutoff sweep and measure classifier response.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("plan", "enumerate the blend plan and write plan.json"),
        ("generate", "render every planned hybrid to PNG"),
        ("evaluate", "classify the generated hybrids and record top-k"),
        ("analyze", "aggregate predictions into curves, crossovers, reports"),
        ("run-all", "all stages in sequence"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--manifest", help="manifest JSON path (plan / run-all)")
        p.add_argument("--out", required=True, help="output directory for all artifacts")
        p.add_argument("--cutoffs", type=_parse_cutoffs, default=None,
                       help="comma-separated sigmas, default 1,4,7,10,13,16,19")
        p.add_argument("--canvas", type=int, default=None,
                       help="square blend canvas size in pixels, default 224")
        p.add_argument("--backend", default="mock",
                       help="'mock' or a path to an ONNX model file")
        p.add_argument("--sidecar", default=None,
                       help="sidecar JSON for an ONNX backend (default: model path with .json)")
        p.add_argument("--k", type=int, default=5, help="ranks to record per image")
        p.add_argument("--workers", type=int, default=None,
                       help="parallel workers (fallback: HYBRIDBENCH_THREADS, then 1)")
        p.add_argument("--overwrite", action="store_true",
                       help="re-render hybrids that already exist")
        p.add_argument("--limit", type=int, default=None,
                       help="keep only the first N specs of the plan")
    return parser


def _resolve_workers(args) -> int:
    if args.workers is not None:
        workers = args.workers
    else:
        workers = int(os.environ.get("HYBRIDBENCH_THREADS", "1"))
    if workers < 1:
        raise ValueError("workers must be >= 1")
    return workers


def _plan_path(out: Path) -> Path:
    return out / "plan.json"


def _load_plan(out: Path) -> dataset.DatasetPlan:
    path = _plan_path(out)
    if not path.is_file():
        raise MissingInputError(f"missing plan file: {path} (run 'plan' first)")
    return dataset.plan_from_json(path.read_text(encoding="utf-8"))


def cmd_plan(args) -> int:
    if not args.manifest:
        raise ValueError("--manifest is required for planning")
    manifests, manifest_cutoffs, manifest_canvas = dataset.load_manifest(args.manifest)
    cutoffs = args.cutoffs or manifest_cutoffs or DEFAULT_CUTOFFS
    if any(c <= 0 for c in cutoffs):
        raise ValueError("cutoffs must be positive")
    if args.canvas is not None:
        canvas = (args.canvas, args.canvas)
    else:
        canvas = manifest_canvas or dataset.DEFAULT_CANVAS
    plan = dataset.plan_dataset(manifests, cutoffs=cutoffs, canvas=canvas)
    if args.limit is not None:
        plan.specs = plan.specs[: args.limit]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _plan_path(out).write_text(dataset.plan_to_json(plan, limit=args.limit), encoding="utf-8")
    print(len(plan.specs))
    return EXIT_OK


def cmd_generate(args) -> int:
    out = Path(args.out)
    plan = _load_plan(out)
    report = dataset.generate_dataset(
        plan, out / "images", workers=_resolve_workers(args), overwrite=args.overwrite
    )
    (out / "generation_report.json").write_text(report.to_json(), encoding="utf-8")
    print(f"generated={report.generated} skipped={report.skipped} failed={report.failed}")
    return EXIT_OK


def _make_backend(args, plan: dataset.DatasetPlan) -> inference.ClassifierBackend:
    if args.backend == "mock":
        return inference.prototype_mock_backend(plan.categories, canvas=plan.canvas)
    model_path = Path(args.backend)
    if not model_path.is_file():
        raise MissingInputError(f"backend model file not found: {model_path}")
    sidecar = args.sidecar or str(model_path.with_suffix(".json"))
    if not Path(sidecar).is_file():
        raise MissingInputError(f"backend sidecar not found: {sidecar}")
    return inference.OnnxBackend(str(model_path), sidecar)


def _eval_labelmap(backend: inference.ClassifierBackend, plan: dataset.DatasetPlan) -> dict:
    mapping = backend.label_map()
    if mapping is None:
        mapping = {m.name: list(m.class_ids) for m in plan.categories}
        for name, ids in mapping.items():
            if not ids:
                raise ValueError(
                    f"category {name!r} has no class_ids in the manifest; "
                    "required for evaluation with this backend"
                )
    return mapping


def cmd_evaluate(args) -> int:
    out = Path(args.out)
    plan = _load_plan(out)
    images_dir = out / "images"
    if not images_dir.is_dir():
        raise MissingInputError(f"missing images directory: {images_dir} (run 'generate' first)")
    backend = _make_backend(args, plan)
    records, failures = inference.evaluate_dataset(
        plan, images_dir, backend, k=args.k, workers=_resolve_workers(args)
    )
    inference.write_predictions_csv(records, out / "predictions.csv")
    (out / "eval_labelmap.json").write_text(
        json.dumps(_eval_labelmap(backend, plan), indent=2), encoding="utf-8"
    )
    if failures:
        (out / "predictions_failures.json").write_text(
            json.dumps(failures, indent=2), encoding="utf-8"
        )
    print(f"records={len(records)} failures={len(failures)}")
    return EXIT_OK


def cmd_analyze(args) -> int:
    out = Path(args.out)
    plan = _load_plan(out)
    predictions = out / "predictions.csv"
    labelmap_path = out / "eval_labelmap.json"
    for path, stage in [(predictions, "evaluate"), (labelmap_path, "evaluate")]:
        if not path.is_file():
            raise MissingInputError(f"missing {path} (run '{stage}' first)")
    records = inference.read_predictions_csv(predictions)
    labelmap = json.loads(labelmap_path.read_text(encoding="utf-8"))
    curves, aggregate_curve = analysis.aggregate(records, labelmap, plan)
    crossovers = [
        analysis.find_crossover(curve, metric)
        for curve in [*curves, aggregate_curve]
        for metric in ("top1", "top5")
    ]
    reports_dir = out / "reports"
    written = analysis.emit_reports(curves, aggregate_curve, crossovers, reports_dir)
    print(f"reports={reports_dir} files={len(written)}")
    return EXIT_OK


def cmd_run_all(args) -> int:
    cmd_plan(args)
    cmd_generate(args)
    cmd_evaluate(args)
    cmd_analyze(args)
    return EXIT_OK


_COMMANDS = {
    "plan": cmd_plan,
    "generate": cmd_generate,
    "evaluate": cmd_evaluate,
    "analyze": cmd_analyze,
    "run-all": cmd_run_all,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except MissingInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISSING
    except (ValueError, FileNotFoundError, inference.ConfigurationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
