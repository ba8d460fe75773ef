"""Cross-category blend planning and deterministic batch generation.

A plan enumerates every ordered category pair, every (low image, high image)
combination, and every cutoff, in a fixed order, so that runs are reproducible
and output files can be named bijectively from their spec.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

from .imaging import DEFAULT_CUTOFFS, compose_hybrid, resize_bilinear
from .pngio import decode_image, encode_image

DEFAULT_CANVAS = (224, 224)


@dataclass(frozen=True)
class CategoryManifest:
    """One category: label name, classifier label ids, ordered source images."""

    name: str
    class_ids: tuple[int, ...]
    images: tuple[str, ...]


@dataclass(frozen=True)
class HybridSpec:
    """One blend job: which image supplies each band, and at what cutoff."""

    low_category: str
    low_index: int
    high_category: str
    high_index: int
    cutoff: float


@dataclass
class DatasetPlan:
    categories: list[CategoryManifest]
    cutoffs: tuple[float, ...]
    canvas: tuple[int, int]
    specs: list[HybridSpec] = field(default_factory=list)

    def category(self, name: str) -> CategoryManifest:
        for cat in self.categories:
            if cat.name == name:
                return cat
        raise KeyError(name)

    def slug_to_name(self) -> dict[str, str]:
        return {slugify(cat.name): cat.name for cat in self.categories}


@dataclass
class GenerationReport:
    generated: int = 0
    skipped: int = 0
    failed: int = 0
    failures: list[dict] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(
            {
                "generated": self.generated,
                "skipped": self.skipped,
                "failed": self.failed,
                "failures": self.failures,
            },
            indent=2,
        )


def slugify(name: str) -> str:
    """Category name to filename token: lowercase, spaces become hyphens."""
    slug = name.lower().replace(" ", "-")
    if not slug:
        raise ValueError("category name must be non-empty")
    if "__" in slug or "/" in slug or "\\" in slug:
        raise ValueError(f"category name {name!r} is not filename-safe")
    return slug


def format_cutoff(cutoff: float) -> str:
    """Shortest exact decimal form, no trailing zeros (13.0 -> '13')."""
    value = float(cutoff)
    if value == int(value):
        return str(int(value))
    return repr(value)


def spec_name(spec: HybridSpec) -> str:
    """Encode a spec as ``<lowcat>_<lowidx>__<highcat>_<highidx>__c<cutoff>``."""
    return (
        f"{slugify(spec.low_category)}_{spec.low_index}"
        f"__{slugify(spec.high_category)}_{spec.high_index}"
        f"__c{format_cutoff(spec.cutoff)}"
    )


def spec_filename(spec: HybridSpec) -> str:
    return spec_name(spec) + ".png"


def parse_spec_name(name: str, categories: list[str] | None = None) -> HybridSpec:
    """Decode a spec name (or filename) back into a HybridSpec.

    Category fields come back in slug form unless ``categories`` supplies the
    original names to map onto.
    """
    stem = name[:-4] if name.endswith(".png") else name
    parts = stem.split("__")
    if len(parts) != 3 or not parts[2].startswith("c"):
        raise ValueError(f"malformed spec name: {name!r}")
    try:
        low_slug, low_idx = parts[0].rsplit("_", 1)
        high_slug, high_idx = parts[1].rsplit("_", 1)
        spec = HybridSpec(
            low_category=low_slug,
            low_index=int(low_idx),
            high_category=high_slug,
            high_index=int(high_idx),
            cutoff=float(parts[2][1:]),
        )
    except ValueError as exc:
        raise ValueError(f"malformed spec name: {name!r}") from exc
    if categories is not None:
        mapping = {slugify(c): c for c in categories}
        try:
            spec = HybridSpec(
                low_category=mapping[spec.low_category],
                low_index=spec.low_index,
                high_category=mapping[spec.high_category],
                high_index=spec.high_index,
                cutoff=spec.cutoff,
            )
        except KeyError as exc:
            raise ValueError(f"spec name {name!r} references unknown category") from exc
    return spec


def enumerate_pairs(categories: list[str]) -> list[tuple[str, str]]:
    """All ordered (low, high) pairs with low != high, in manifest order."""
    if len(categories) < 2:
        raise ValueError("need at least 2 categories to form pairs")
    if len(set(categories)) != len(categories):
        raise ValueError("category names must be distinct")
    return [(low, high) for low in categories for high in categories if low != high]


def plan_dataset(
    manifests: list[CategoryManifest],
    cutoffs: tuple[float, ...] | list[float] = DEFAULT_CUTOFFS,
    canvas: tuple[int, int] = DEFAULT_CANVAS,
    require_files: bool = False,
) -> DatasetPlan:
    """Enumerate the full blend plan over ``manifests``.

    Spec order is deterministic: ordered category pair in manifest order, then
    low image index, then high image index, then cutoff ascending.
    """
    names = [m.name for m in manifests]
    if len(set(names)) != len(names):
        raise ValueError("duplicate category names in manifest set")
    slugs = [slugify(n) for n in names]
    if len(set(slugs)) != len(slugs):
        raise ValueError("category names collide after slugging")
    for m in manifests:
        if not m.images:
            raise ValueError(f"category {m.name!r} has an empty image list")
        if require_files:
            for p in m.images:
                if not os.path.isfile(p):
                    raise FileNotFoundError(f"source image missing: {p}")
    ordered_cutoffs = tuple(sorted(float(c) for c in cutoffs))
    if not ordered_cutoffs:
        raise ValueError("cutoff list must be non-empty")
    if len(set(ordered_cutoffs)) != len(ordered_cutoffs):
        raise ValueError("cutoff list contains duplicates")
    for c in ordered_cutoffs:
        if not (c >= 0):
            raise ValueError(f"cutoffs must be >= 0, got {c}")
    width, height = int(canvas[0]), int(canvas[1])
    if width < 1 or height < 1:
        raise ValueError(f"canvas must be >= 1x1, got {canvas}")

    by_name = {m.name: m for m in manifests}
    specs = [
        HybridSpec(low, li, high, hi, cutoff)
        for low, high in enumerate_pairs(names)
        for li in range(len(by_name[low].images))
        for hi in range(len(by_name[high].images))
        for cutoff in ordered_cutoffs
    ]
    return DatasetPlan(
        categories=list(manifests),
        cutoffs=ordered_cutoffs,
        canvas=(width, height),
        specs=specs,
    )


def load_manifest(path: str | os.PathLike):
    """Read a manifest JSON file.

    Returns (manifests, cutoffs_or_None, canvas_or_None). Relative image paths
    resolve against the manifest's directory.
    """
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict) or "categories" not in doc:
        raise ValueError(f"manifest {path} must be an object with a 'categories' array")
    base = path.parent
    manifests = []
    for entry in doc["categories"]:
        try:
            name = entry["name"]
            class_ids = tuple(int(i) for i in entry.get("class_ids", []))
            images = tuple(
                str(p) if os.path.isabs(p) else str(base / p) for p in entry["images"]
            )
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed category entry in {path}: {entry!r}") from exc
        manifests.append(CategoryManifest(name=name, class_ids=class_ids, images=images))
    cutoffs = tuple(float(c) for c in doc["cutoffs"]) if "cutoffs" in doc else None
    canvas = None
    if "canvas" in doc:
        canvas = (int(doc["canvas"]["width"]), int(doc["canvas"]["height"]))
    return manifests, cutoffs, canvas


def plan_to_json(plan: DatasetPlan, limit: int | None = None) -> str:
    """Serialize a plan compactly; specs re-derive from the stored fields."""
    doc = {
        "categories": [
            {"name": m.name, "class_ids": list(m.class_ids), "images": list(m.images)}
            for m in plan.categories
        ],
        "cutoffs": list(plan.cutoffs),
        "canvas": {"width": plan.canvas[0], "height": plan.canvas[1]},
        "spec_count": len(plan.specs),
    }
    if limit is not None:
        doc["limit"] = int(limit)
    return json.dumps(doc, indent=2)


def plan_from_json(text: str) -> DatasetPlan:
    doc = json.loads(text)
    manifests = [
        CategoryManifest(
            name=e["name"],
            class_ids=tuple(int(i) for i in e.get("class_ids", [])),
            images=tuple(e["images"]),
        )
        for e in doc["categories"]
    ]
    plan = plan_dataset(
        manifests,
        cutoffs=tuple(doc["cutoffs"]),
        canvas=(doc["canvas"]["width"], doc["canvas"]["height"]),
    )
    limit = doc.get("limit")
    if limit is not None:
        plan.specs = plan.specs[: int(limit)]
    return plan


@lru_cache(maxsize=64)
def _load_canvas_image(path: str, width: int, height: int):
    """Decode + resize cache; read-only after warm-up, one cache per process."""
    return resize_bilinear(decode_image(path), width, height)


def _render_spec(job: tuple) -> tuple[str, str, str | None]:
    """Render one hybrid to disk. Returns (status, spec_name, reason)."""
    name, low_path, high_path, cutoff, width, height, out_path, overwrite = job
    if not overwrite and os.path.exists(out_path):
        return ("skipped", name, None)
    try:
        low = _load_canvas_image(low_path, width, height)
        high = _load_canvas_image(high_path, width, height)
        hybrid = compose_hybrid(low, high, cutoff)
        tmp_path = f"{out_path}.tmp-{os.getpid()}"
        encode_image(hybrid, tmp_path)
        os.replace(tmp_path, out_path)
        return ("generated", name, None)
    except Exception as exc:
        return ("failed", name, f"{type(exc).__name__}: {exc}")


def generate_dataset(
    plan: DatasetPlan,
    out_dir: str | os.PathLike,
    workers: int = 1,
    overwrite: bool = False,
) -> GenerationReport:
    """Materialize every spec in ``plan`` as a PNG under ``out_dir``.

    Output bytes are identical regardless of worker count. Per-spec failures
    (unreadable sources, decode errors) are recorded and never abort the run.
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if not os.access(out, os.W_OK):
        raise PermissionError(f"output directory not writable: {out}")

    by_name = {m.name: m for m in plan.categories}
    width, height = plan.canvas
    jobs = [
        (
            spec_name(spec),
            by_name[spec.low_category].images[spec.low_index],
            by_name[spec.high_category].images[spec.high_index],
            spec.cutoff,
            width,
            height,
            str(out / spec_filename(spec)),
            overwrite,
        )
        for spec in plan.specs
    ]

    if workers == 1:
        results = map(_render_spec, jobs)
    else:
        pool = ProcessPoolExecutor(max_workers=workers)
        results = pool.map(_render_spec, jobs, chunksize=16)

    report = GenerationReport()
    for status, name, reason in results:
        if status == "generated":
            report.generated += 1
        elif status == "skipped":
            report.skipped += 1
        else:
            report.failed += 1
            report.failures.append({"spec": name, "reason": reason})
    if workers > 1:
        pool.shutdown()
    return report
