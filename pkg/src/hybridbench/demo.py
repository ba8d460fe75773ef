"""Synthetic demo data: two categories the mock backend can tell apart.

The "gradient" class is smooth ramps (all energy at low spatial frequency),
the "checkerboard" class is a fixed-phase block pattern (energy at a mid
frequency that survives a high-pass once the cutoff grows). Blending one into
the other therefore flips the mock's verdict somewhere along the sweep.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

import numpy as np

from .labels import imagenet_fruit_ids
from .pngio import encode_image

CHECKER_PERIOD = 32


def gradient_image(index: int, size: int = 224) -> np.ndarray:
    """Horizontal ramp; per-index slope and offset keep the images distinct."""
    slope = (0.7, 1.0, 0.85, 0.9, 0.75, 0.95)[index % 6]
    offset = (0.05, 0.0, 0.1, 0.02, 0.12, 0.04)[index % 6]
    ramp = offset + slope * np.linspace(0.0, 1.0, size)
    img = np.repeat(ramp[np.newaxis, :], size, axis=0)
    return np.clip(np.stack([img, img, img], axis=-1), 0.0, 1.0)


def checkerboard_image(index: int, size: int = 224) -> np.ndarray:
    """Fixed-phase checkerboard; per-index contrast keeps the images distinct."""
    amplitude = (0.5, 0.42, 0.46, 0.38, 0.48, 0.44)[index % 6]
    coords = np.arange(size) // (CHECKER_PERIOD // 2)
    parity = (coords[:, np.newaxis] + coords[np.newaxis, :]) % 2
    img = 0.5 + amplitude * (2.0 * parity - 1.0)
    return np.clip(np.stack([img, img, img], axis=-1), 0.0, 1.0)


def write_demo_tree(
    root: str | os.PathLike,
    images_per_category: int = 3,
    size: int = 224,
) -> Path:
    """Write demo PNGs plus a manifest.json under ``root``; returns the manifest path."""
    root = Path(root)
    images_dir = root / "images"
    images_dir.mkdir(parents=True, exist_ok=True)
    makers = [("gradient", gradient_image), ("checkerboard", checkerboard_image)]
    categories = []
    for label_id, (name, make) in enumerate(makers):
        paths = []
        for i in range(images_per_category):
            rel = f"images/{name}_{i}.png"
            encode_image(make(i, size), root / rel)
            paths.append(rel)
        categories.append({"name": name, "class_ids": [label_id], "images": paths})
    manifest_path = root / "manifest.json"
    manifest_path.write_text(
        json.dumps({"categories": categories}, indent=2), encoding="utf-8"
    )
    return manifest_path


def write_fruit_manifest_template(path: str | os.PathLike, images_per_category: int = 10) -> Path:
    """Manifest skeleton for the ten fruit categories with ImageNet label ids.

    Image paths are placeholders: populate them with your own files before
    planning a run.
    """
    path = Path(path)
    categories = []
    for name, ids in imagenet_fruit_ids().items():
        slug = name.lower().replace(" ", "-")
        categories.append(
            {
                "name": name,
                "class_ids": ids,
                "images": [f"images/{slug}_{i}.png" for i in range(images_per_category)],
            }
        )
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps({"categories": categories}, indent=2), encoding="utf-8")
    return path


def download_source_images(manifest_path: str | os.PathLike) -> None:
    """Stub: source photos are not redistributable, so nothing is fetched.

    Collect your own images (e.g. 10 per category), place them at the paths
    the manifest lists, and re-run planning. This function only reports what
    is still missing.
    """
    manifest_path = Path(manifest_path)
    doc = json.loads(manifest_path.read_text(encoding="utf-8"))
    missing = []
    for cat in doc.get("categories", []):
        for rel in cat.get("images", []):
            p = Path(rel) if os.path.isabs(rel) else manifest_path.parent / rel
            if not p.is_file():
                missing.append(str(p))
    if missing:
        listing = "\n  ".join(missing)
        raise NotImplementedError(
            "no downloader is bundled; supply these files yourself:\n  " + listing
        )
