import csv
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from hybridbench import dataset
from hybridbench.analysis import (
    AggregateCurve,
    PairCurve,
    aggregate,
    emit_reports,
    find_crossover,
)
from hybridbench.inference import PredictionRecord
from hybridbench.labels import imagenet_fruit_ids

from conftest import paper_shaped_manifests

CUTOFFS = (1.0, 4.0, 7.0, 10.0, 13.0, 16.0, 19.0)


def fruit_plan():
    return dataset.plan_dataset(paper_shaped_manifests(1), cutoffs=CUTOFFS)


def record_for(spec, ids, backend="mock"):
    scores = tuple(1.0 - 0.1 * i for i in range(len(ids)))
    return PredictionRecord(
        spec=dataset.spec_name(spec), backend=backend,
        topk_ids=tuple(ids), topk_scores=scores,
    )


# --- aggregation --------------------------------------------------------------

def test_single_record_hits():
    plan = fruit_plan()
    spec = dataset.HybridSpec("Banana", 0, "Fig", 0, 1.0)
    records = [record_for(spec, [954, 12, 7, 3, 1])]
    curves, agg = aggregate(records, imagenet_fruit_ids(), plan)
    banana_fig = next(
        c for c in curves if (c.low_category, c.high_category) == ("Banana", "Fig")
    )
    assert banana_fig.n_images == (1, 0, 0, 0, 0, 0, 0)
    assert banana_fig.obj1_top1 == (1, 0, 0, 0, 0, 0, 0)
    assert banana_fig.obj1_top5 == (1, 0, 0, 0, 0, 0, 0)
    assert banana_fig.obj2_top1 == (0,) * 7
    assert banana_fig.obj2_top5 == (0,) * 7
    assert agg.obj1_top1 == (1, 0, 0, 0, 0, 0, 0)


def test_saturated_low_category_yields_100_percent():
    plan = fruit_plan()
    labelmap = imagenet_fruit_ids()
    records = []
    for spec in plan.specs:
        if spec.cutoff == 1.0:
            low_id = labelmap[spec.low_category][0]
            records.append(record_for(spec, [low_id, 0, 1, 2, 3]))
    curves, agg = aggregate(records, labelmap, plan)
    assert len(curves) == 90
    assert agg.n_images[0] == 90
    assert agg.percentages("obj1_top1")[0] == 100.0


def random_records(plan, labelmap, rng, coverage=1.0):
    names = list(labelmap)
    all_ids = [i for ids in labelmap.values() for i in ids]
    records = []
    for spec in plan.specs:
        if rng.uniform() > coverage:
            continue
        ids = list(rng.choice(all_ids + list(range(100, 120)), size=5, replace=False))
        records.append(record_for(spec, [int(i) for i in ids]))
    return records


def test_conservation_and_bounds(rng):
    plan = fruit_plan()
    labelmap = imagenet_fruit_ids()
    records = random_records(plan, labelmap, rng, coverage=0.8)
    curves, agg = aggregate(records, labelmap, plan)
    for i in range(len(CUTOFFS)):
        for field in ("n_images", "obj1_top1", "obj1_top5", "obj2_top1", "obj2_top5"):
            assert getattr(agg, field)[i] == sum(getattr(c, field)[i] for c in curves)
    for c in curves:
        for i in range(len(CUTOFFS)):
            assert 0 <= c.obj1_top1[i] <= c.obj1_top5[i] <= c.n_images[i]
            assert 0 <= c.obj2_top1[i] <= c.obj2_top5[i] <= c.n_images[i]
    for field in ("obj1_top1", "obj1_top5", "obj2_top1", "obj2_top5"):
        assert all(0.0 <= p <= 100.0 for p in agg.percentages(field))


def test_relabeling_equivariance(rng):
    plan = fruit_plan()
    labelmap = imagenet_fruit_ids()
    records = random_records(plan, labelmap, rng)
    curves, _ = aggregate(records, labelmap, plan)

    def swap(rec):
        spec = dataset.parse_spec_name(rec.spec, categories=list(labelmap))
        mirrored = dataset.HybridSpec(
            spec.high_category, spec.high_index, spec.low_category, spec.low_index, spec.cutoff
        )
        return PredictionRecord(
            spec=dataset.spec_name(mirrored), backend=rec.backend,
            topk_ids=rec.topk_ids, topk_scores=rec.topk_scores,
        )

    swapped_curves, _ = aggregate([swap(r) for r in records], labelmap, plan)
    by_pair = {(c.low_category, c.high_category): c for c in swapped_curves}
    for c in curves:
        mirror = by_pair[(c.high_category, c.low_category)]
        assert mirror.obj1_top1 == c.obj2_top1
        assert mirror.obj2_top1 == c.obj1_top1
        assert mirror.obj1_top5 == c.obj2_top5
        assert mirror.obj2_top5 == c.obj1_top5


def test_unknown_category_in_labelmap_rejected(rng):
    plan = fruit_plan()
    labelmap = imagenet_fruit_ids()
    incomplete = {k: v for k, v in labelmap.items() if k != "Banana"}
    with pytest.raises(ValueError):
        aggregate([], incomplete, plan)


def test_both_categories_in_top5_count_for_both():
    plan = fruit_plan()
    spec = dataset.HybridSpec("Banana", 0, "Fig", 0, 1.0)
    records = [record_for(spec, [954, 952, 7, 3, 1])]
    curves, _ = aggregate(records, imagenet_fruit_ids(), plan)
    banana_fig = next(
        c for c in curves if (c.low_category, c.high_category) == ("Banana", "Fig")
    )
    assert banana_fig.obj1_top5[0] == 1
    assert banana_fig.obj2_top5[0] == 1
    assert banana_fig.obj2_top1[0] == 0


# --- crossover ----------------------------------------------------------------

def make_curve(obj1, obj2, cutoffs=CUTOFFS, n=100):
    size = len(cutoffs)
    return PairCurve(
        low_category="A", high_category="B", cutoffs=tuple(cutoffs),
        n_images=(n,) * size,
        obj1_top1=tuple(obj1), obj2_top1=tuple(obj2),
        obj1_top5=tuple(obj1), obj2_top5=tuple(obj2),
    )


def test_crossover_hand_example():
    curve = make_curve([90, 80, 60, 40, 30, 20, 10], [10, 20, 40, 60, 70, 80, 90])
    result = find_crossover(curve, "top1")
    assert result.crossover == pytest.approx(8.5, abs=1e-12)
    assert result.bracket == (7.0, 10.0)


def test_crossover_absent_when_one_curve_dominates():
    curve = make_curve([90, 85, 80, 75, 70, 65, 60], [10, 15, 20, 25, 30, 35, 40])
    result = find_crossover(curve, "top1")
    assert result.crossover is None
    assert result.bracket is None


def test_crossover_equal_curves_reports_first_cutoff():
    curve = make_curve([50] * 7, [50] * 7)
    result = find_crossover(curve, "top1")
    assert result.crossover == 1.0
    assert result.bracket == (1.0, 1.0)


def test_crossover_zero_at_interior_sample():
    curve = make_curve([90, 80, 50, 40, 30, 20, 10], [10, 20, 50, 60, 70, 80, 90])
    result = find_crossover(curve, "top1")
    assert result.crossover == 7.0


def test_crossover_lies_in_bracket_random_curves(rng):
    for _ in range(100):
        obj1 = rng.integers(0, 101, size=7)
        obj2 = rng.integers(0, 101, size=7)
        result = find_crossover(make_curve(obj1, obj2), "top1")
        d = obj1.astype(int) - obj2.astype(int)
        sign_change = any(
            d[i] == 0 or d[i] * d[i + 1] < 0 for i in range(6)
        ) or d[6] == 0
        if result.crossover is None:
            assert not sign_change
        else:
            lo, hi = result.bracket
            assert lo <= result.crossover <= hi
            assert CUTOFFS[0] <= result.crossover <= CUTOFFS[-1]
            # first sign change by brute-force scan agrees with the bracket
            for i in range(7):
                if d[i] == 0:
                    assert result.bracket == (CUTOFFS[i], CUTOFFS[i])
                    break
                if i < 6 and d[i] * d[i + 1] < 0:
                    assert result.bracket == (CUTOFFS[i], CUTOFFS[i + 1])
                    break


def test_crossover_metric_validation():
    curve = make_curve([1] * 7, [0] * 7)
    with pytest.raises(ValueError):
        find_crossover(curve, "top3")
    short = make_curve([1], [0], cutoffs=(1.0,))
    with pytest.raises(ValueError):
        find_crossover(short, "top1")


def test_crossover_on_aggregate_curve():
    agg = AggregateCurve(
        cutoffs=CUTOFFS, n_images=(200,) * 7,
        obj1_top1=(180, 160, 120, 80, 60, 40, 20),
        obj2_top1=(20, 40, 80, 120, 140, 160, 180),
        obj1_top5=(200,) * 7, obj2_top5=(200,) * 7,
    )
    result = find_crossover(agg, "top1")
    assert result.low_category == "ALL"
    assert result.crossover == pytest.approx(8.5)
    top5 = find_crossover(agg, "top5")
    assert top5.crossover == 1.0


# --- reports ------------------------------------------------------------------

@pytest.fixture
def two_category_reports(tmp_path):
    curves = [
        make_curve([9, 8, 6, 4, 3, 2, 1], [0, 1, 3, 5, 6, 7, 8], n=9),
        make_curve([8, 7, 5, 4, 2, 1, 1], [1, 2, 4, 5, 7, 8, 8], n=9),
    ]
    curves[1].low_category, curves[1].high_category = "B", "A"
    agg = AggregateCurve(
        cutoffs=CUTOFFS,
        n_images=tuple(a + b for a, b in zip(curves[0].n_images, curves[1].n_images)),
        obj1_top1=tuple(a + b for a, b in zip(curves[0].obj1_top1, curves[1].obj1_top1)),
        obj2_top1=tuple(a + b for a, b in zip(curves[0].obj2_top1, curves[1].obj2_top1)),
        obj1_top5=tuple(a + b for a, b in zip(curves[0].obj1_top5, curves[1].obj1_top5)),
        obj2_top5=tuple(a + b for a, b in zip(curves[0].obj2_top5, curves[1].obj2_top5)),
    )
    crossovers = [find_crossover(c, m) for c in [*curves, agg] for m in ("top1", "top5")]
    out = tmp_path / "reports"
    written = emit_reports(curves, agg, crossovers, out)
    return out, written, curves


def test_report_bundle_contents(two_category_reports):
    out, written, curves = two_category_reports
    assert (out / "aggregate.csv").is_file()
    assert (out / "crossovers.csv").is_file()
    assert (out / "aggregate.svg").is_file()
    assert (out / "grid.svg").is_file()
    pair_files = sorted((out / "pairs").glob("*.csv"))
    assert [p.name for p in pair_files] == ["a__b.csv", "b__a.csv"]


def test_pair_csv_row_count_and_header(two_category_reports):
    out, _, curves = two_category_reports
    with open(out / "pairs" / "a__b.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == [
        "cutoff", "obj1_top1", "obj2_top1", "obj1_top5", "obj2_top5", "n",
        "obj1_top1_pct", "obj2_top1_pct", "obj1_top5_pct", "obj2_top5_pct",
    ]
    assert len(rows) - 1 == len(CUTOFFS)
    first = rows[1]
    assert first[0] == "1"
    assert first[1] == "9"
    assert first[5] == "9"
    assert first[6] == "100.0000"


def test_crossovers_csv_schema(two_category_reports):
    out, _, _ = two_category_reports
    with open(out / "crossovers.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == [
        "low_category", "high_category", "metric",
        "crossover_cutoff", "bracket_lo", "bracket_hi",
    ]
    assert len(rows) - 1 == 6  # 2 pairs + aggregate, two metrics each
    assert {r[2] for r in rows[1:]} == {"top1", "top5"}
    assert any(r[0] == "ALL" for r in rows[1:])


def test_svgs_are_well_formed_with_expected_series(two_category_reports):
    out, _, _ = two_category_reports
    agg_root = ET.parse(out / "aggregate.svg").getroot()
    ns = "{http://www.w3.org/2000/svg}"
    polylines = agg_root.findall(f".//{ns}polyline")
    assert len(polylines) == 4
    grid_root = ET.parse(out / "grid.svg").getroot()
    cells = [g for g in grid_root.findall(f".//{ns}g") if g.get("class") == "cell"]
    assert len(cells) == 2
    for cell in cells:
        assert len(cell.findall(f"{ns}polyline")) == 4


def test_emit_reports_requires_curves(tmp_path):
    with pytest.raises(ValueError):
        emit_reports([], None, [], tmp_path)


def test_crossover_csv_empty_fields_for_none(tmp_path):
    curve = make_curve([9] * 7, [1] * 7)
    agg = AggregateCurve(
        cutoffs=CUTOFFS, n_images=(9,) * 7,
        obj1_top1=(9,) * 7, obj2_top1=(1,) * 7,
        obj1_top5=(9,) * 7, obj2_top5=(1,) * 7,
    )
    crossovers = [find_crossover(curve, "top1")]
    emit_reports([curve], agg, crossovers, tmp_path / "r")
    rows = (tmp_path / "r" / "crossovers.csv").read_text().splitlines()
    assert rows[1] == "A,B,top1,,,"
