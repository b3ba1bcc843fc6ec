import math

import numpy as np
import pytest

from poisswave.baselines import (BinnedCounts, anscombe, anscombe_uni,
                                 bin_counts, cycle_spin, haar_inverse,
                                 haar_transform, inverse_anscombe_to_intensity,
                                 default_bins, universal_haar_denoise)
from poisswave.pointprocess import PointSample
from poisswave.rng import substream
from poisswave.signals import SIGNALS, sample_points


def test_bin_counts():
    s = PointSample(np.array([0.1, 0.9]), 2)
    b = bin_counts(s, (0.0, 1.0), 2)
    np.testing.assert_array_equal(b.counts, [1, 1])
    assert b.dropped == 0
    empty = bin_counts(PointSample(np.empty(0), 2), (0.0, 1.0), 4)
    np.testing.assert_array_equal(empty.counts, [0, 0, 0, 0])
    # midpoint lands in the second bin (left-closed bins)
    mid = bin_counts(PointSample(np.array([0.5]), 1), (0.0, 1.0), 2)
    np.testing.assert_array_equal(mid.counts, [0, 1])
    out = bin_counts(PointSample(np.array([-1.0, 0.5, 2.0]), 3), (0.0, 1.0), 2)
    assert out.dropped == 2
    with pytest.raises(ValueError):
        bin_counts(s, (1.0, 0.0), 2)
    with pytest.raises(ValueError):
        bin_counts(s, (0.0, 1.0), 3)
    with pytest.raises(ValueError):
        BinnedCounts((0.0, 1.0), np.array([1, -1]), 2)


def test_anscombe_values():
    b = BinnedCounts((0.0, 1.0), np.array([0, 10]), 4)
    y = anscombe(b)
    assert y[0] == pytest.approx(2 * math.sqrt(0.375))
    assert y[0] == pytest.approx(1.224744871, abs=1e-6)
    assert y[1] == pytest.approx(6.442049363, abs=1e-6)
    counts = BinnedCounts((0.0, 1.0), np.arange(16) ** 2, 4)
    assert np.all(np.diff(anscombe(counts)) > 0)


def test_anscombe_variance_stabilization():
    rng = substream(55)
    for m in (5, 10, 50):
        draws = rng.poisson(m, 100000)
        v = np.var(2.0 * np.sqrt(draws + 0.375))
        assert 0.9 <= v <= 1.1


def test_haar_filter_bank_orthonormal():
    rng = np.random.default_rng(8)
    for B in (2, 8, 256):
        y = rng.normal(size=B)
        c = haar_transform(y)
        np.testing.assert_allclose(haar_inverse(c), y, atol=1e-12)
        assert np.sum(c * c) == pytest.approx(np.sum(y * y), rel=1e-12)
    # partial decomposition also round-trips
    y = rng.normal(size=64)
    c = haar_transform(y, coarse=3)
    np.testing.assert_allclose(haar_inverse(c, coarse=3), y, atol=1e-12)
    with pytest.raises(ValueError):
        haar_transform(np.zeros(12))


def test_universal_denoise_constant_and_small_atom():
    const = np.full(128, 2.5)
    np.testing.assert_allclose(universal_haar_denoise(const), const, atol=1e-12)
    # a small bump is below the universal threshold and gets flattened
    y = np.zeros(64)
    y[0] = 0.5
    out = universal_haar_denoise(y, sigma=1.0)
    np.testing.assert_allclose(out, np.full(64, y.mean()), atol=1e-12)


def test_universal_denoise_kills_almost_all_noise():
    rng = np.random.default_rng(9)
    survived = 0
    total = 0
    for _ in range(20):
        y = rng.normal(size=1024)
        c = haar_transform(universal_haar_denoise(y))
        survived += np.sum(np.abs(c[1:]) > 0)
        total += 1023
    assert survived / total < 2e-3


def test_inverse_anscombe_round_trip():
    counts = BinnedCounts((0.0, 2.0), np.array([3, 0, 7, 1]), 16)
    est = inverse_anscombe_to_intensity(anscombe(counts), counts.window, 4, 16)
    np.testing.assert_allclose(est, counts.counts * 4 / (16 * 2.0), atol=1e-12)
    zeros = inverse_anscombe_to_intensity(np.zeros(4), (0.0, 1.0), 4, 16)
    np.testing.assert_array_equal(zeros, np.zeros(4))


def test_cycle_spin():
    counts = bin_counts(sample_points(SIGNALS["Haar2"], 512, substream(3, 0)),
                        (0.0, 1.0), 64)
    denoiser = lambda y: universal_haar_denoise(y, 1.0)
    plain = denoiser(anscombe(counts))
    np.testing.assert_allclose(cycle_spin(counts, denoiser, 1), plain, atol=1e-12)
    # constant data: invariant under spinning
    const = BinnedCounts((0.0, 1.0), np.full(32, 9), 8)
    np.testing.assert_allclose(cycle_spin(const, denoiser, 32),
                               anscombe(const), atol=1e-12)
    # full-orbit spin commutes with circular shifts of the data
    shifted = BinnedCounts(counts.window, np.roll(counts.counts, 5), counts.n)
    a = cycle_spin(counts, denoiser, 64)
    b = cycle_spin(shifted, denoiser, 64)
    np.testing.assert_allclose(np.roll(a, 5), b, atol=1e-10)
    with pytest.raises(ValueError):
        cycle_spin(counts, denoiser, 3)


def test_default_bins():
    assert default_bins(1024) == 32
    assert default_bins(4096) == 64
    assert default_bins(2) == 2
    assert default_bins(100) == 8  # sqrt(100)=10, nearest power of 2
    with pytest.raises(ValueError):
        default_bins(1)


def test_anscombe_uni_default_bin_count():
    sample = sample_points(SIGNALS["Haar1"], 1024, substream(15, 0))
    est = anscombe_uni(sample, (0.0, 1.0))
    assert est.size == default_bins(1024)


def test_anscombe_uni_pipeline_flat_signal():
    sample = sample_points(SIGNALS["Haar1"], 2048, substream(14, 0))
    est = anscombe_uni(sample, (0.0, 1.0), 256)
    assert np.mean((est - 1.0) ** 2) < 0.05
    est_ti = anscombe_uni(sample, (0.0, 1.0), 256, translation_invariant=True)
    assert np.mean((est_ti - 1.0) ** 2) < 0.05
