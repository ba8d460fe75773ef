"""
Score a classifier across the cutoff sweep and find the crossover
=================================================================

The full loop, no ML runtime needed: the built-in mock backend is a
nearest-prototype classifier over 32x32 thumbnails. For each cutoff we
count how often the low-band category (obj1) and the high-band category
(obj2) land in the top-1 predictions. obj1 dominates at small cutoffs,
obj2 at large ones, and the two curves cross in between; the crossover
is where the model is least decided.

Run from the repository root:  python3 demos/03_mock_benchmark.py
Reports (CSV + SVG) land in demo_out/benchmark/reports/.
"""

from pathlib import Path

from hybridbench import (
    aggregate,
    emit_reports,
    evaluate_dataset,
    find_crossover,
    generate_dataset,
    load_manifest,
    plan_dataset,
    prototype_mock_backend,
)

out_dir = Path("demo_out/benchmark")

manifests, _, _ = load_manifest("demo/manifest.json")
plan = plan_dataset(manifests)
generate_dataset(plan, out_dir / "images", workers=2)

backend = prototype_mock_backend(plan.categories, canvas=plan.canvas)
records, failures = evaluate_dataset(plan, out_dir / "images", backend, k=5, workers=2)
print(f"classified {len(records)} hybrids ({len(failures)} failures)")

curves, agg = aggregate(records, backend.label_map(), plan)
print("\ncutoff   obj1-top1%   obj2-top1%")
for cutoff, p1, p2 in zip(agg.cutoffs, agg.percentages("obj1_top1"), agg.percentages("obj2_top1")):
    print(f"{cutoff:>6g}   {p1:>9.1f}    {p2:>9.1f}")

crossovers = [find_crossover(c, m) for c in [*curves, agg] for m in ("top1", "top5")]
for result in crossovers:
    where = "aggregate" if result.low_category == "ALL" else f"{result.low_category}+{result.high_category}"
    value = "none" if result.crossover is None else f"{result.crossover:.2f}"
    print(f"crossover[{result.metric}] {where}: {value}")

written = emit_reports(curves, agg, crossovers, out_dir / "reports")
print(f"\nwrote {len(written)} report files to {out_dir / 'reports'}/")
