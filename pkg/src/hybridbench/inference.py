"""Classifier backends and the top-k evaluation harness.

Backends expose a label space, an input contract (size, layout, mean, std),
and a deterministic ``classify``. The built-in prototype backend needs no ML
runtime; ONNX models load through an optional onnxruntime dependency.
"""

from __future__ import annotations

import csv
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dataset import CategoryManifest, DatasetPlan, spec_filename, spec_name
from .imaging import resize_bilinear, validate_image
from .pngio import decode_image

RESIZE_SHORTER_SIDE = 256


class ConfigurationError(Exception):
    """Backend or sidecar metadata is missing or malformed."""


@dataclass(frozen=True)
class InputSpec:
    """Input contract a backend declares (normally via its sidecar JSON)."""

    width: int = 224
    height: int = 224
    layout: str = "CHW"
    mean: tuple[float, float, float] = (0.0, 0.0, 0.0)
    std: tuple[float, float, float] = (1.0, 1.0, 1.0)

    @staticmethod
    def from_sidecar(doc: dict) -> "InputSpec":
        try:
            inp = doc["input"]
            spec = InputSpec(
                width=int(inp["width"]),
                height=int(inp["height"]),
                layout=str(inp["layout"]).upper(),
                mean=tuple(float(v) for v in inp["mean"]),
                std=tuple(float(v) for v in inp["std"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigurationError(f"sidecar input metadata missing or malformed: {exc}") from exc
        if spec.layout not in ("CHW", "HWC"):
            raise ConfigurationError(f"unsupported layout {spec.layout!r}")
        if len(spec.mean) != 3 or len(spec.std) != 3:
            raise ConfigurationError("mean and std must each have 3 entries")
        return spec


class ClassifierBackend:
    """Interface: deterministic scores over a fixed label space."""

    name: str = "backend"
    label_space_size: int = 0
    input_spec: InputSpec = InputSpec()
    thread_safe: bool = True

    def classify(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def label_map(self) -> dict[str, list[int]] | None:
        """Category-name to label-id mapping, when the backend defines one."""
        return None


@dataclass(frozen=True)
class PredictionRecord:
    spec: str
    backend: str
    topk_ids: tuple[int, ...]
    topk_scores: tuple[float, ...]


def _resize_crop_geometry(w: int, h: int, crop_w: int, crop_h: int) -> tuple[int, int, int, int]:
    """Resized dimensions and crop offsets: (new_w, new_h, left, top)."""
    short, long = (h, w) if h <= w else (w, h)
    new_long = int(round(long * RESIZE_SHORTER_SIDE / short))
    new_h, new_w = (RESIZE_SHORTER_SIDE, new_long) if h <= w else (new_long, RESIZE_SHORTER_SIDE)
    if new_w < crop_w or new_h < crop_h:
        raise ValueError(f"resized image {new_w}x{new_h} smaller than crop {crop_w}x{crop_h}")
    return new_w, new_h, (new_w - crop_w) // 2, (new_h - crop_h) // 2


def preprocess(img: np.ndarray, input_spec: InputSpec) -> np.ndarray:
    """Standard eval-time input path: resize shorter side to 256, center crop.

    The crop size, normalization constants, and layout come from the backend's
    input contract. An image already at the crop size skips the geometric
    steps entirely, so canvas-sized hybrids are never resampled twice.
    Returns float32.
    """
    arr = validate_image(img)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValueError(f"preprocess expects an RGB image, got shape {arr.shape}")
    h, w = arr.shape[0], arr.shape[1]
    cw, ch = input_spec.width, input_spec.height
    if (w, h) == (cw, ch):
        cropped = arr
    else:
        new_w, new_h, left, top = _resize_crop_geometry(w, h, cw, ch)
        resized = resize_bilinear(arr, new_w, new_h)
        cropped = resized[top : top + ch, left : left + cw, :]

    mean = np.asarray(input_spec.mean, dtype=np.float64)
    std = np.asarray(input_spec.std, dtype=np.float64)
    normalized = (cropped - mean) / std
    if input_spec.layout == "CHW":
        normalized = normalized.transpose(2, 0, 1)
    return np.ascontiguousarray(normalized, dtype=np.float32)


def top_k(scores: np.ndarray, k: int) -> list[tuple[int, float]]:
    """Indices and scores of the k largest entries; ties go to lower index."""
    vec = np.asarray(scores, dtype=np.float64).reshape(-1)
    if np.isnan(vec).any():
        raise ValueError("NaN in score vector")
    if not 1 <= k <= vec.size:
        raise ValueError(f"k must be in [1, {vec.size}], got {k}")
    order = np.argsort(-vec, kind="stable")[:k]
    return [(int(i), float(vec[i])) for i in order]


def _softmax(z: np.ndarray) -> np.ndarray:
    shifted = z - np.max(z)
    e = np.exp(shifted)
    return e / e.sum()


class PrototypeMockBackend(ClassifierBackend):
    """Nearest-prototype classifier over 32x32 thumbnails.

    One label per category; scores are a softmax over negative mean-squared
    distances to per-category prototype thumbnails. Deterministic, no ML
    runtime involved.
    """

    THUMB = 32

    def __init__(self, names: list[str], prototypes: np.ndarray):
        self.name = "mock"
        self.names = list(names)
        self.prototypes = prototypes
        self.label_space_size = len(names)
        self.input_spec = InputSpec()
        self.thread_safe = True

    def thumbnail(self, x: np.ndarray) -> np.ndarray:
        """Input tensor to the 32x32 comparison space."""
        if x.ndim != 3:
            raise ValueError(f"expected a 3-D input tensor, got shape {x.shape}")
        hwc = x.transpose(1, 2, 0) if self.input_spec.layout == "CHW" else x
        return resize_bilinear(hwc.astype(np.float64), self.THUMB, self.THUMB)

    def classify(self, x: np.ndarray) -> np.ndarray:
        thumb = self.thumbnail(x)
        dists = np.array(
            [np.mean((thumb - proto) ** 2) for proto in self.prototypes]
        )
        return _softmax(-dists)

    def label_map(self) -> dict[str, list[int]]:
        return {name: [i] for i, name in enumerate(self.names)}


def prototype_mock_backend(
    manifests: list[CategoryManifest],
    canvas: tuple[int, int] = (224, 224),
) -> PrototypeMockBackend:
    """Build the mock backend: prototype = mean of a category's thumbnails.

    Prototype images travel the same road a hybrid does at evaluation time
    (resize to canvas, standard preprocess, thumbnail), so a query identical
    to a source image lands exactly on its prototype.
    """
    if not manifests:
        raise ValueError("manifest list must be non-empty")
    width, height = canvas
    backend = PrototypeMockBackend([m.name for m in manifests], np.empty(0))
    prototypes = []
    for m in manifests:
        if not m.images:
            raise ValueError(f"category {m.name!r} has no images")
        thumbs = []
        for path in m.images:
            img = resize_bilinear(decode_image(path), width, height)
            thumbs.append(backend.thumbnail(preprocess(img, backend.input_spec)))
        prototypes.append(np.mean(thumbs, axis=0))
    backend.prototypes = np.stack(prototypes)
    return backend


class OnnxBackend(ClassifierBackend):
    """ONNX model plus sidecar JSON declaring the input contract."""

    def __init__(self, model_path: str, sidecar_path: str):
        try:
            import onnxruntime
        except ImportError as exc:
            raise ConfigurationError(
                "onnxruntime is required for ONNX backends; install the 'onnx' extra"
            ) from exc
        sidecar = load_sidecar(sidecar_path)
        self.input_spec = InputSpec.from_sidecar(sidecar)
        self.name = sidecar.get("identity", Path(model_path).stem)
        self.session = onnxruntime.InferenceSession(
            model_path, providers=["CPUExecutionProvider"]
        )
        self._input_name = self.session.get_inputs()[0].name
        labels_path = sidecar.get("labels")
        if labels_path is not None:
            labels_file = Path(sidecar_path).parent / labels_path
            with open(labels_file, encoding="utf-8") as fh:
                self.labels = json.load(fh)
            self.label_space_size = len(self.labels)
        else:
            self.labels = None
            self.label_space_size = int(self.session.get_outputs()[0].shape[-1])
        self.thread_safe = True

    def classify(self, x: np.ndarray) -> np.ndarray:
        out = self.session.run(None, {self._input_name: x[np.newaxis, ...]})[0]
        return np.asarray(out).reshape(-1)


def load_sidecar(path: str | os.PathLike) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"cannot read sidecar {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigurationError(f"sidecar {path} must be a JSON object")
    return doc


def _predict_one(
    spec, images_dir: Path, backend: ClassifierBackend, k: int
) -> tuple[PredictionRecord | None, dict | None]:
    name = spec_name(spec)
    path = images_dir / spec_filename(spec)
    if not path.is_file():
        return None, {"spec": name, "reason": "missing file"}
    try:
        tensor = preprocess(decode_image(path), backend.input_spec)
        scores = backend.classify(tensor)
        ranked = top_k(scores, k)
    except ValueError as exc:
        return None, {"spec": name, "reason": str(exc)}
    except OSError as exc:
        return None, {"spec": name, "reason": f"decode error: {exc}"}
    return (
        PredictionRecord(
            spec=name,
            backend=backend.name,
            topk_ids=tuple(i for i, _ in ranked),
            topk_scores=tuple(s for _, s in ranked),
        ),
        None,
    )


def evaluate_dataset(
    plan: DatasetPlan,
    images_dir: str | os.PathLike,
    backend: ClassifierBackend,
    k: int = 5,
    workers: int = 1,
) -> tuple[list[PredictionRecord], list[dict]]:
    """Classify every hybrid in the plan; records come back in plan order.

    Missing or undecodable files become failure entries instead of records.
    Scheduling is unobservable: results are keyed by spec index. ``k`` clamps
    to the backend's label space when that space is smaller.
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    k = min(k, backend.label_space_size)
    images = Path(images_dir)

    if workers == 1 or not backend.thread_safe:
        outcomes = [_predict_one(spec, images, backend, k) for spec in plan.specs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(
                pool.map(lambda s: _predict_one(s, images, backend, k), plan.specs)
            )

    records = [rec for rec, _ in outcomes if rec is not None]
    failures = [fail for _, fail in outcomes if fail is not None]
    return records, failures


def write_predictions_csv(records: list[PredictionRecord], path: str | os.PathLike) -> None:
    """One row per (spec, rank): ``spec,backend,rank,label_id,score``. LF endings."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["spec", "backend", "rank", "label_id", "score"])
        for rec in records:
            for rank, (label_id, score) in enumerate(zip(rec.topk_ids, rec.topk_scores), start=1):
                writer.writerow([rec.spec, rec.backend, rank, label_id, repr(score)])


def read_predictions_csv(path: str | os.PathLike) -> list[PredictionRecord]:
    grouped: dict[tuple[str, str], list[tuple[int, int, float]]] = {}
    order: list[tuple[str, str]] = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            key = (row["spec"], row["backend"])
            if key not in grouped:
                grouped[key] = []
                order.append(key)
            grouped[key].append((int(row["rank"]), int(row["label_id"]), float(row["score"])))
    records = []
    for key in order:
        entries = sorted(grouped[key])
        records.append(
            PredictionRecord(
                spec=key[0],
                backend=key[1],
                topk_ids=tuple(e[1] for e in entries),
                topk_scores=tuple(e[2] for e in entries),
            )
        )
    return records
