"""Gaussian filtering, resampling, and hybrid composition on float images.

Images are numpy arrays of shape (height, width, channels) or (height, width),
dtype float, nominal range [0, 1]. Filtering never clamps: high-pass output is
signed, and clamping happens exactly once, inside :func:`compose_hybrid` (and
again at 8-bit encode, see :mod:`hybridbench.pngio`).

The cutoff parameter of every filter is the standard deviation (in pixels) of
a spatial Gaussian blur. Kernels are truncated at radius ceil(3*sigma) and
renormalized, and all convolutions replicate edge pixels outward.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DEFAULT_CUTOFFS = (1.0, 4.0, 7.0, 10.0, 13.0, 16.0, 19.0)


@dataclass(frozen=True)
class GaussianKernel:
    """Normalized 1-D Gaussian tap array.

    Attributes:
        sigma: Standard deviation in pixels.
        radius: Half-width of the support; taps has 2*radius + 1 entries.
        taps: Non-negative weights summing to 1, symmetric about the center.
    """

    sigma: float
    radius: int
    taps: np.ndarray


def validate_image(img: np.ndarray) -> np.ndarray:
    """Check that ``img`` is a finite 2-D or 3-D float image and return it."""
    arr = np.asarray(img)
    if arr.ndim not in (2, 3):
        raise ValueError(f"image must be 2-D or 3-D, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"image dimensions must be >= 1, got shape {arr.shape}")
    if arr.ndim == 3 and arr.shape[2] < 1:
        raise ValueError(f"image must have at least one channel, got shape {arr.shape}")
    if not np.issubdtype(arr.dtype, np.floating):
        arr = arr.astype(np.float64)
    if not np.all(np.isfinite(arr)):
        raise ValueError("image contains NaN or Inf samples")
    return arr


def build_gaussian_kernel(cutoff: float) -> GaussianKernel:
    """Build the normalized 1-D Gaussian kernel for a cutoff of ``sigma`` pixels.

    Taps are proportional to exp(-i**2 / (2*sigma**2)) for integer offsets
    i in [-radius, radius] with radius = ceil(3*sigma), then divided by their
    sum. A cutoff of 0 yields the identity kernel [1.0].
    """
    sigma = float(cutoff)
    if not math.isfinite(sigma) or sigma < 0:
        raise ValueError(f"cutoff must be finite and >= 0, got {cutoff!r}")
    if sigma == 0.0:
        return GaussianKernel(sigma=0.0, radius=0, taps=np.array([1.0]))
    radius = math.ceil(3.0 * sigma)
    offsets = np.arange(-radius, radius + 1, dtype=np.float64)
    taps = np.exp(-(offsets**2) / (2.0 * sigma**2))
    taps /= taps.sum()
    return GaussianKernel(sigma=sigma, radius=radius, taps=taps)


# Above this tap count the FFT route is faster than the sliding sum.
_FFT_TAP_THRESHOLD = 16


def _filter_axis(img: np.ndarray, taps: np.ndarray, axis: int) -> np.ndarray:
    """1-D correlation along ``axis`` with replicate (clamp-to-edge) padding."""
    radius = len(taps) // 2
    if radius == 0:
        return img * taps[0]
    pad = [(0, 0)] * img.ndim
    pad[axis] = (radius, radius)
    padded = np.pad(img, pad, mode="edge")
    length = img.shape[axis]
    if len(taps) > _FFT_TAP_THRESHOLD:
        return _correlate_fft(padded, taps, axis, length)
    out = np.zeros_like(img)
    index: list[slice] = [slice(None)] * img.ndim
    for i, weight in enumerate(taps):
        index[axis] = slice(i, i + length)
        out += weight * padded[tuple(index)]
    return out


def _next_fast_len(n: int) -> int:
    """Smallest 5-smooth integer >= n (fast FFT sizes)."""
    while True:
        m = n
        for prime in (2, 3, 5):
            while m % prime == 0:
                m //= prime
        if m == 1:
            return n
        n += 1


def _correlate_fft(padded: np.ndarray, taps: np.ndarray, axis: int, length: int) -> np.ndarray:
    """Same correlation computed in the frequency domain.

    The padded extent already absorbs the kernel support, so the circular
    convolution never wraps into the first ``length`` output samples and the
    result equals the direct sliding sum to float round-off. Transforms run at
    a 5-smooth size; the zero tail past the edge padding is never read.
    """
    n_fft = _next_fast_len(padded.shape[axis])
    kernel = np.zeros(n_fft)
    kernel[: len(taps)] = taps
    spectrum = np.fft.rfft(padded, n=n_fft, axis=axis) * np.conj(
        np.fft.rfft(kernel).reshape([-1 if d == axis else 1 for d in range(padded.ndim)])
    )
    correlated = np.fft.irfft(spectrum, n=n_fft, axis=axis)
    index: list[slice] = [slice(None)] * padded.ndim
    index[axis] = slice(0, length)
    return np.ascontiguousarray(correlated[tuple(index)])


def low_pass(img: np.ndarray, cutoff: float) -> np.ndarray:
    """Gaussian-blur ``img`` with standard deviation ``cutoff`` pixels.

    Separable implementation: a horizontal pass followed by a vertical pass
    with the same 1-D kernel, each channel filtered independently. A cutoff
    of 0 returns a value-identical copy.
    """
    arr = validate_image(img)
    kernel = build_gaussian_kernel(cutoff)
    if kernel.radius == 0:
        return arr.copy()
    out = _filter_axis(arr, kernel.taps, axis=1)
    out = _filter_axis(out, kernel.taps, axis=0)
    return out


def high_pass(img: np.ndarray, cutoff: float) -> np.ndarray:
    """Return ``img - low_pass(img, cutoff)``; output samples may be negative."""
    arr = validate_image(img)
    return arr - low_pass(arr, cutoff)


def compose_hybrid(low_src: np.ndarray, high_src: np.ndarray, cutoff: float) -> np.ndarray:
    """Blend the blurred ``low_src`` with the detail residue of ``high_src``.

    Output is clamp(low_pass(low_src) + high_pass(high_src), 0, 1). This is a
    sum of two band-separated images, not a pixel interpolation of the inputs.
    """
    low = validate_image(low_src)
    high = validate_image(high_src)
    if low.shape != high.shape:
        raise ValueError(
            f"source dimensions differ: {low.shape} vs {high.shape}"
        )
    blended = low_pass(low, cutoff) + high_pass(high, cutoff)
    return np.clip(blended, 0.0, 1.0)


def resize_bilinear(img: np.ndarray, out_w: int, out_h: int) -> np.ndarray:
    """Resample ``img`` to ``out_w`` x ``out_h`` with bilinear interpolation.

    Uses the half-pixel-center convention: output pixel j samples the source
    at (j + 0.5) * in/out - 0.5, clamped to the valid range. Resizing to the
    input dimensions returns a value-identical copy.
    """
    arr = validate_image(img)
    if out_w < 1 or out_h < 1:
        raise ValueError(f"target dimensions must be >= 1, got {out_w}x{out_h}")
    in_h, in_w = arr.shape[0], arr.shape[1]
    if (out_w, out_h) == (in_w, in_h):
        return arr.copy()
    out = _resample_axis(arr, out_h, axis=0)
    out = _resample_axis(out, out_w, axis=1)
    return out


def _resample_axis(img: np.ndarray, out_size: int, axis: int) -> np.ndarray:
    """Bilinear resampling of one axis (the 2-D resize is separable)."""
    in_size = img.shape[axis]
    if out_size == in_size:
        return img
    centers = (np.arange(out_size, dtype=np.float64) + 0.5) * (in_size / out_size) - 0.5
    centers = np.clip(centers, 0.0, in_size - 1.0)
    lo = np.floor(centers).astype(np.intp)
    hi = np.minimum(lo + 1, in_size - 1)
    frac = centers - lo
    shape = [1] * img.ndim
    shape[axis] = out_size
    frac = frac.reshape(shape)
    return np.take(img, lo, axis=axis) * (1.0 - frac) + np.take(img, hi, axis=axis) * frac
