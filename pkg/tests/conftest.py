import math

import numpy as np
import pytest

from hybridbench import dataset, demo


def dense_low_pass(img: np.ndarray, sigma: float) -> np.ndarray:
    """Reference blur: direct 2-D dense convolution on an edge-padded image.

    Independent of the library's separable path: builds the full 2-D kernel
    as an outer product and contracts it against explicit sliding windows.
    """
    arr = np.asarray(img, dtype=np.float64)
    squeeze = arr.ndim == 2
    if squeeze:
        arr = arr[:, :, np.newaxis]
    if sigma == 0:
        return arr[:, :, 0] if squeeze else arr.copy()
    radius = math.ceil(3.0 * sigma)
    offsets = np.arange(-radius, radius + 1, dtype=np.float64)
    taps = np.exp(-(offsets**2) / (2.0 * sigma**2))
    taps /= taps.sum()
    kernel2d = np.outer(taps, taps)
    padded = np.pad(arr, ((radius, radius), (radius, radius), (0, 0)), mode="edge")
    windows = np.lib.stride_tricks.sliding_window_view(
        padded, (2 * radius + 1, 2 * radius + 1), axis=(0, 1)
    )
    out = np.einsum("hwcij,ij->hwc", windows, kernel2d)
    return out[:, :, 0] if squeeze else out


def smooth_random_image(rng: np.random.Generator, size: int = 48) -> np.ndarray:
    """Random low-order cosine mixture: smooth, natural-ish, values in [0, 1]."""
    y, x = np.meshgrid(np.arange(size), np.arange(size), indexing="ij")
    img = np.zeros((size, size, 3))
    for c in range(3):
        field = np.zeros((size, size))
        for _ in range(4):
            fx, fy = rng.uniform(-0.05, 0.05, size=2)
            amp = rng.uniform(0.05, 0.2)
            phase = rng.uniform(0, 2 * np.pi)
            field += amp * np.cos(2 * np.pi * (fx * x + fy * y) + phase)
        img[:, :, c] = field
    img -= img.min()
    peak = img.max()
    if peak > 0:
        img /= peak
    return 0.1 + 0.8 * img


def natural_random_image(rng: np.random.Generator, size: int = 224) -> np.ndarray:
    """Random image with a 1/f amplitude spectrum, values in roughly [0.05, 0.95]."""
    freqs = np.fft.fftfreq(size)
    fx, fy = np.meshgrid(freqs, freqs)
    radial = np.sqrt(fx**2 + fy**2)
    radial[0, 0] = 1.0
    img = np.zeros((size, size, 3))
    for c in range(3):
        spectrum = (
            rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
        ) / radial
        field = np.fft.ifft2(spectrum).real
        field = (field - field.min()) / (field.max() - field.min())
        img[:, :, c] = field
    return 0.05 + 0.9 * img


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)


@pytest.fixture(scope="session")
def demo_tree(tmp_path_factory):
    """Demo manifest + source images (2 categories x 3 images)."""
    root = tmp_path_factory.mktemp("demo")
    manifest_path = demo.write_demo_tree(root)
    manifests, _, _ = dataset.load_manifest(manifest_path)
    return {"root": root, "manifest_path": manifest_path, "manifests": manifests}


@pytest.fixture(scope="session")
def desk_plan(demo_tree):
    """126-spec desk-scale plan over the demo tree."""
    return dataset.plan_dataset(demo_tree["manifests"])


@pytest.fixture(scope="session")
def desk_images(demo_tree, desk_plan, tmp_path_factory):
    """Generated hybrids for the desk-scale plan."""
    out = tmp_path_factory.mktemp("hybrids")
    report = dataset.generate_dataset(desk_plan, out, workers=2)
    assert report.failed == 0
    return out


def paper_shaped_manifests(images_per_category: int = 10):
    """10 fruit categories with synthetic path entries (planning only)."""
    from hybridbench.labels import imagenet_fruit_ids

    manifests = []
    for name, ids in imagenet_fruit_ids().items():
        slug = name.lower().replace(" ", "-")
        manifests.append(
            dataset.CategoryManifest(
                name=name,
                class_ids=tuple(ids),
                images=tuple(f"/nonexistent/{slug}_{i}.png" for i in range(images_per_category)),
            )
        )
    return manifests
