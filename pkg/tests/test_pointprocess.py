import numpy as np
import pytest

from poisswave.pointprocess import (PointSample, integrate_against,
                                    merge_samples, poisson_count)
from poisswave.rng import substream


def test_point_sample_validation():
    PointSample(np.array([0.1, 0.2, 0.2, 0.9]), 4)  # ties allowed
    with pytest.raises(ValueError):
        PointSample(np.array([0.2, 0.1]), 4)
    with pytest.raises(ValueError):
        PointSample(np.array([0.1, np.nan]), 4)
    with pytest.raises(ValueError):
        PointSample(np.array([[0.1]]), 4)
    with pytest.raises(ValueError):
        PointSample(np.empty(0), 0)


def test_count():
    assert PointSample(np.empty(0), 3).count == 0
    assert PointSample(np.array([0.5]), 3).count == 1


def test_poisson_count():
    rng = substream(0)
    assert poisson_count(0.0, rng) == 0
    draws = [poisson_count(7.0, rng) for _ in range(2000)]
    assert abs(np.mean(draws) - 7.0) < 4 * np.sqrt(7.0 / 2000)
    with pytest.raises(ValueError):
        poisson_count(-1.0, rng)
    with pytest.raises(ValueError):
        poisson_count(float("inf"), rng)


def test_integrate_against():
    empty = PointSample(np.empty(0), 5)
    assert integrate_against(lambda x: x, empty) == 0.0
    s = PointSample(np.array([0.1, 0.4, 0.6]), 5)
    box = lambda x: ((x >= 0.0) & (x < 0.5)).astype(float)
    assert integrate_against(box, s) == 2.0
    assert integrate_against(lambda x: x, s) == pytest.approx(1.1)


def test_merge_samples():
    a = PointSample(np.array([0.3, 0.7]), 4)
    b = PointSample(np.array([0.1, 0.9]), 6)
    m = merge_samples(a, b)
    assert m.n == 10
    np.testing.assert_array_equal(m.points, [0.1, 0.3, 0.7, 0.9])
