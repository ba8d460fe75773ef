"""Frequency-response curves, crossover points, and CSV/SVG reports.

Counts how often each blended object's category lands in the top-1 / top-5
predictions per cutoff, per ordered pair and pooled, then locates where the
two curves cross.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass
from pathlib import Path

from .dataset import DatasetPlan, parse_spec_name, slugify
from .inference import PredictionRecord

AGGREGATE_LABEL = "ALL"

_COUNT_FIELDS = ("obj1_top1", "obj2_top1", "obj1_top5", "obj2_top5")


@dataclass
class PairCurve:
    """Per-cutoff hit counts for one ordered (low, high) category pair.

    obj1 is the low-pass source category, obj2 the high-pass source category.
    """

    low_category: str
    high_category: str
    cutoffs: tuple[float, ...]
    n_images: tuple[int, ...]
    obj1_top1: tuple[int, ...]
    obj2_top1: tuple[int, ...]
    obj1_top5: tuple[int, ...]
    obj2_top5: tuple[int, ...]


@dataclass
class AggregateCurve:
    """Counts summed over every ordered pair, with pooled percentages."""

    cutoffs: tuple[float, ...]
    n_images: tuple[int, ...]
    obj1_top1: tuple[int, ...]
    obj2_top1: tuple[int, ...]
    obj1_top5: tuple[int, ...]
    obj2_top5: tuple[int, ...]

    def percentages(self, field: str) -> tuple[float, ...]:
        counts = getattr(self, field)
        return tuple(
            100.0 * c / n if n else 0.0 for c, n in zip(counts, self.n_images)
        )


@dataclass
class CrossoverResult:
    low_category: str
    high_category: str
    metric: str
    crossover: float | None
    bracket: tuple[float, float] | None


def aggregate(
    records: list[PredictionRecord],
    labelmap: dict[str, list[int] | set[int]],
    plan: DatasetPlan,
) -> tuple[list[PairCurve], AggregateCurve]:
    """Bucket records into per-pair curves and the pooled aggregate.

    A record scores an obj1 top-1 hit when its rank-1 label id belongs to the
    low category, a top-5 hit when any of the first five do; obj2 likewise
    with the high category. Records may cover only part of the plan: n adjusts
    per cutoff.
    """
    for name in (m.name for m in plan.categories):
        if name not in labelmap:
            raise ValueError(f"category {name!r} missing from label map")
    id_sets = {name: set(ids) for name, ids in labelmap.items()}
    names = [m.name for m in plan.categories]
    cutoffs = plan.cutoffs
    cutoff_pos = {c: i for i, c in enumerate(cutoffs)}

    pairs = [(low, high) for low in names for high in names if low != high]
    counts = {
        pair: {"n": [0] * len(cutoffs), **{f: [0] * len(cutoffs) for f in _COUNT_FIELDS}}
        for pair in pairs
    }

    for rec in records:
        spec = parse_spec_name(rec.spec, categories=names)
        pair = (spec.low_category, spec.high_category)
        if pair not in counts:
            raise ValueError(f"record {rec.spec!r} references a pair outside the plan")
        if spec.cutoff not in cutoff_pos:
            raise ValueError(f"record {rec.spec!r} has a cutoff outside the plan")
        slot = cutoff_pos[spec.cutoff]
        bucket = counts[pair]
        top1 = rec.topk_ids[0]
        top5 = set(rec.topk_ids[:5])
        bucket["n"][slot] += 1
        if top1 in id_sets[spec.low_category]:
            bucket["obj1_top1"][slot] += 1
        if top5 & id_sets[spec.low_category]:
            bucket["obj1_top5"][slot] += 1
        if top1 in id_sets[spec.high_category]:
            bucket["obj2_top1"][slot] += 1
        if top5 & id_sets[spec.high_category]:
            bucket["obj2_top5"][slot] += 1

    curves = [
        PairCurve(
            low_category=low,
            high_category=high,
            cutoffs=cutoffs,
            n_images=tuple(counts[(low, high)]["n"]),
            **{f: tuple(counts[(low, high)][f]) for f in _COUNT_FIELDS},
        )
        for low, high in pairs
    ]
    total = AggregateCurve(
        cutoffs=cutoffs,
        n_images=tuple(sum(c.n_images[i] for c in curves) for i in range(len(cutoffs))),
        **{
            f: tuple(sum(getattr(c, f)[i] for c in curves) for i in range(len(cutoffs)))
            for f in _COUNT_FIELDS
        },
    )
    return curves, total


def find_crossover(curve: PairCurve | AggregateCurve, metric: str = "top1") -> CrossoverResult:
    """First cutoff where the obj1 and obj2 curves meet.

    Scans d = obj1 - obj2 over the sampled cutoffs: an exact zero at a sample
    returns that cutoff; the first adjacent sign change returns the linearly
    interpolated root; no sign change returns None.
    """
    if metric not in ("top1", "top5"):
        raise ValueError(f"metric must be 'top1' or 'top5', got {metric!r}")
    obj1 = getattr(curve, f"obj1_{metric}")
    obj2 = getattr(curve, f"obj2_{metric}")
    cutoffs = curve.cutoffs
    if len(cutoffs) < 2:
        raise ValueError("curve needs at least 2 cutoffs")
    low, high = _curve_identity(curve)
    d = [a - b for a, b in zip(obj1, obj2)]
    for i, sigma in enumerate(cutoffs):
        if d[i] == 0:
            return CrossoverResult(low, high, metric, float(sigma), (float(sigma), float(sigma)))
        if i + 1 < len(cutoffs) and d[i] * d[i + 1] < 0:
            lo, hi = float(cutoffs[i]), float(cutoffs[i + 1])
            root = lo + (hi - lo) * d[i] / (d[i] - d[i + 1])
            return CrossoverResult(low, high, metric, root, (lo, hi))
    return CrossoverResult(low, high, metric, None, None)


def _curve_identity(curve: PairCurve | AggregateCurve) -> tuple[str, str]:
    if isinstance(curve, PairCurve):
        return curve.low_category, curve.high_category
    return AGGREGATE_LABEL, AGGREGATE_LABEL


# --- report emission ---------------------------------------------------------

_CURVE_HEADER = [
    "cutoff",
    "obj1_top1",
    "obj2_top1",
    "obj1_top5",
    "obj2_top5",
    "n",
    "obj1_top1_pct",
    "obj2_top1_pct",
    "obj1_top5_pct",
    "obj2_top5_pct",
]


def emit_reports(
    curves: list[PairCurve],
    aggregate_curve: AggregateCurve,
    crossovers: list[CrossoverResult],
    out_dir: str | os.PathLike,
) -> dict[str, str]:
    """Write aggregate.csv, per-pair CSVs, crossovers.csv, and the SVG charts.

    Returns a name -> path mapping of everything written.
    """
    if not curves:
        raise ValueError("no curves to report")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    pairs_dir = out / "pairs"
    pairs_dir.mkdir(exist_ok=True)

    written = {}
    agg_csv = out / "aggregate.csv"
    _write_curve_csv(aggregate_curve, agg_csv)
    written["aggregate.csv"] = str(agg_csv)

    for curve in curves:
        name = f"{slugify(curve.low_category)}__{slugify(curve.high_category)}.csv"
        path = pairs_dir / name
        _write_curve_csv(curve, path)
        written[f"pairs/{name}"] = str(path)

    cross_csv = out / "crossovers.csv"
    with open(cross_csv, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ["low_category", "high_category", "metric", "crossover_cutoff", "bracket_lo", "bracket_hi"]
        )
        for c in crossovers:
            if c.crossover is None:
                writer.writerow([c.low_category, c.high_category, c.metric, "", "", ""])
            else:
                writer.writerow(
                    [
                        c.low_category,
                        c.high_category,
                        c.metric,
                        f"{c.crossover:g}",
                        f"{c.bracket[0]:g}",
                        f"{c.bracket[1]:g}",
                    ]
                )
    written["crossovers.csv"] = str(cross_csv)

    agg_svg = out / "aggregate.svg"
    agg_svg.write_text(_aggregate_svg(aggregate_curve), encoding="utf-8")
    written["aggregate.svg"] = str(agg_svg)

    grid_svg = out / "grid.svg"
    grid_svg.write_text(_grid_svg(curves), encoding="utf-8")
    written["grid.svg"] = str(grid_svg)
    return written


def _write_curve_csv(curve: PairCurve | AggregateCurve, path: Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(_CURVE_HEADER)
        for i, cutoff in enumerate(curve.cutoffs):
            n = curve.n_images[i]
            row = [
                f"{cutoff:g}",
                curve.obj1_top1[i],
                curve.obj2_top1[i],
                curve.obj1_top5[i],
                curve.obj2_top5[i],
                n,
            ]
            for f in ("obj1_top1", "obj2_top1", "obj1_top5", "obj2_top5"):
                count = getattr(curve, f)[i]
                row.append(f"{100.0 * count / n:.4f}" if n else "0.0000")
            writer.writerow(row)


# --- hand-emitted SVG --------------------------------------------------------

_SERIES_STYLE = [
    ("obj1_top1", "#4c72b0", None),
    ("obj2_top1", "#c44e52", None),
    ("obj1_top5", "#4c72b0", "6,3"),
    ("obj2_top5", "#c44e52", "6,3"),
]


def _polyline(points: list[tuple[float, float]], color: str, dash: str | None) -> str:
    coords = " ".join(f"{x:.2f},{y:.2f}" for x, y in points)
    dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
    return (
        f'<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash_attr} '
        f'points="{coords}" />'
    )


def _chart_lines(
    curve: PairCurve | AggregateCurve,
    x0: float,
    y0: float,
    width: float,
    height: float,
    with_axes: bool = True,
) -> list[str]:
    """Polylines (plus optional axes/ticks) for one percentage-vs-cutoff chart."""
    cutoffs = curve.cutoffs
    cmin, cmax = min(cutoffs), max(cutoffs)
    span = cmax - cmin or 1.0

    def to_xy(cutoff: float, pct: float) -> tuple[float, float]:
        x = x0 + (cutoff - cmin) / span * width
        y = y0 + height - pct / 100.0 * height
        return x, y

    parts = []
    if with_axes:
        parts.append(
            f'<rect x="{x0:.2f}" y="{y0:.2f}" width="{width:.2f}" height="{height:.2f}" '
            f'fill="none" stroke="#888" stroke-width="0.8" />'
        )
        for cutoff in cutoffs:
            x, _ = to_xy(cutoff, 0.0)
            parts.append(
                f'<line x1="{x:.2f}" y1="{y0 + height:.2f}" x2="{x:.2f}" '
                f'y2="{y0 + height + 4:.2f}" stroke="#888" stroke-width="0.8" />'
            )
            parts.append(
                f'<text x="{x:.2f}" y="{y0 + height + 14:.2f}" font-size="9" '
                f'text-anchor="middle" fill="#333">{cutoff:g}</text>'
            )
        for pct in (0, 25, 50, 75, 100):
            _, y = to_xy(cmin, float(pct))
            parts.append(
                f'<text x="{x0 - 4:.2f}" y="{y + 3:.2f}" font-size="9" '
                f'text-anchor="end" fill="#333">{pct}</text>'
            )
    n = curve.n_images
    for field, color, dash in _SERIES_STYLE:
        counts = getattr(curve, field)
        pcts = [100.0 * c / nn if nn else 0.0 for c, nn in zip(counts, n)]
        points = [to_xy(cut, pct) for cut, pct in zip(cutoffs, pcts)]
        parts.append(_polyline(points, color, dash))
    return parts


def _aggregate_svg(curve: AggregateCurve) -> str:
    width, height = 640, 480
    plot = _chart_lines(curve, x0=60, y0=40, width=520, height=380)
    legend = []
    for i, (field, color, dash) in enumerate(_SERIES_STYLE):
        y = 52 + 14 * i
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        legend.append(
            f'<line x1="70" y1="{y}" x2="95" y2="{y}" stroke="{color}" '
            f'stroke-width="1.5"{dash_attr} />'
        )
        legend.append(
            f'<text x="100" y="{y + 3}" font-size="10" fill="#333">{field}</text>'
        )
    body = "\n".join(
        [
            '<text x="320" y="20" font-size="13" text-anchor="middle" fill="#111">'
            "Blended-object hit rate vs cutoff</text>",
            '<text x="320" y="468" font-size="11" text-anchor="middle" fill="#333">'
            "cutoff (Gaussian sigma, px)</text>",
            '<text x="16" y="230" font-size="11" text-anchor="middle" fill="#333" '
            'transform="rotate(-90 16 230)">percent of hybrids</text>',
        ]
        + plot
        + legend
    )
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {width} {height}" '
        f'width="{width}" height="{height}">\n<rect width="{width}" height="{height}" '
        f'fill="white" />\n{body}\n</svg>\n'
    )


def _grid_svg(curves: list[PairCurve]) -> str:
    """Small-multiples matrix: one cell per ordered pair, rows by low category."""
    rows = []
    for c in curves:
        if c.low_category not in rows:
            rows.append(c.low_category)
    by_row: dict[str, list[PairCurve]] = {r: [] for r in rows}
    for c in curves:
        by_row[c.low_category].append(c)
    n_cols = max(len(v) for v in by_row.values())

    cell_w, cell_h, pad = 150, 110, 14
    label_w = 90
    width = label_w + n_cols * (cell_w + pad) + pad
    height = pad + len(rows) * (cell_h + pad + 16)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {width} {height}" '
        f'width="{width}" height="{height}">',
        f'<rect width="{width}" height="{height}" fill="white" />',
    ]
    for r, low in enumerate(rows):
        y0 = pad + r * (cell_h + pad + 16)
        parts.append(
            f'<text x="{label_w - 8}" y="{y0 + cell_h / 2:.2f}" font-size="11" '
            f'text-anchor="end" fill="#111">{low}</text>'
        )
        for col, curve in enumerate(by_row[low]):
            x0 = label_w + col * (cell_w + pad)
            parts.append(f'<g class="cell" data-pair="{curve.low_category}__{curve.high_category}">')
            parts.append(
                f'<text x="{x0 + cell_w / 2:.2f}" y="{y0 - 3:.2f}" font-size="9" '
                f'text-anchor="middle" fill="#333">{curve.low_category} + {curve.high_category}</text>'
            )
            parts.extend(
                _chart_lines(curve, x0=x0, y0=y0, width=cell_w, height=cell_h, with_axes=False)
            )
            parts.append(
                f'<rect x="{x0}" y="{y0}" width="{cell_w}" height="{cell_h}" '
                f'fill="none" stroke="#bbb" stroke-width="0.8" />'
            )
            parts.append("</g>")
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
