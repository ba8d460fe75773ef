"""8-bit RGB image decode/encode at the pipeline boundary.

Decode maps sRGB bytes to floats in [0, 1]; encode clamps, quantizes with
round-half-away-from-zero, and writes PNG. No gamma linearization: blending
happens in display space.
"""

from __future__ import annotations

import os

import numpy as np
from PIL import Image

from .imaging import validate_image


def decode_image(path: str | os.PathLike) -> np.ndarray:
    """Load ``path`` as an RGB float image shaped (H, W, 3) in [0, 1]."""
    with Image.open(path) as im:
        rgb = im.convert("RGB")
        arr = np.asarray(rgb, dtype=np.float64) / 255.0
    return arr


def quantize_u8(img: np.ndarray) -> np.ndarray:
    """Clamp to [0, 1] and quantize to uint8, rounding halves away from zero."""
    arr = validate_image(img)
    clamped = np.clip(arr, 0.0, 1.0)
    return np.floor(clamped * 255.0 + 0.5).astype(np.uint8)


def encode_image(img: np.ndarray, path: str | os.PathLike) -> None:
    """Write ``img`` as an 8-bit RGB PNG. Output bytes are deterministic."""
    arr = validate_image(img)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValueError(f"encode expects an RGB image shaped (H, W, 3), got {arr.shape}")
    Image.fromarray(quantize_u8(arr), mode="RGB").save(path, format="PNG")
