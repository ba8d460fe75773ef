import numpy as np
import pytest

from hybridbench.imaging import build_gaussian_kernel

# Direct per-tap evaluation of exp(-i^2/32) normalized by its sum, sigma=4.
SIGMA4_CENTER = 0.09990835810495224
SIGMA4_OFF1 = 0.09683450107728372
SIGMA4_OFF12 = 0.0011098816043293872

# Direct evaluation of exp(-i^2/2) normalized, sigma=1.
SIGMA1_TAPS = [
    0.004433048175243745,
    0.054005582622414484,
    0.2420362293761143,
    0.3990502796524549,
    0.2420362293761143,
    0.054005582622414484,
    0.004433048175243745,
]


def test_sigma_zero_is_identity_kernel():
    k = build_gaussian_kernel(0)
    assert k.radius == 0
    assert k.taps.tolist() == [1.0]


def test_sigma_one_shape_and_normalization():
    k = build_gaussian_kernel(1)
    assert k.radius == 3
    assert len(k.taps) == 7
    assert abs(k.taps.sum() - 1.0) <= 1e-6
    assert np.array_equal(k.taps, k.taps[::-1])
    np.testing.assert_allclose(k.taps, SIGMA1_TAPS, atol=1e-12)


def test_sigma_four_matches_direct_evaluation():
    k = build_gaussian_kernel(4)
    assert k.radius == 12
    assert len(k.taps) == 25
    assert k.taps[12] == pytest.approx(SIGMA4_CENTER, abs=1e-12)
    assert k.taps[13] == pytest.approx(SIGMA4_OFF1, abs=1e-12)
    assert k.taps[24] == pytest.approx(SIGMA4_OFF12, abs=1e-12)
    offsets = np.arange(-12, 13, dtype=float)
    direct = np.exp(-(offsets**2) / 32.0)
    direct /= direct.sum()
    np.testing.assert_allclose(k.taps, direct, atol=1e-12)


@pytest.mark.parametrize("sigma", [0.5, 1, 4, 7, 10, 13, 16, 19])
def test_sweep_normalization_and_symmetry(sigma):
    k = build_gaussian_kernel(sigma)
    assert abs(k.taps.sum() - 1.0) <= 1e-6
    assert np.array_equal(k.taps, k.taps[::-1])
    assert k.taps[k.radius] == k.taps.max()
    assert (k.taps >= 0).all()


def test_random_sigmas_up_to_32(rng):
    for sigma in rng.uniform(0.01, 32.0, size=25):
        k = build_gaussian_kernel(sigma)
        assert abs(k.taps.sum() - 1.0) <= 1e-6
        assert np.array_equal(k.taps, k.taps[::-1])
        assert len(k.taps) == 2 * k.radius + 1


@pytest.mark.parametrize("bad", [-1, -0.001, float("nan"), float("inf")])
def test_invalid_cutoff_rejected(bad):
    with pytest.raises(ValueError):
        build_gaussian_kernel(bad)
