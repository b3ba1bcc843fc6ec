"""Poisson-process realisations and integration against the point measure."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PointSample:
    """One realisation of the process: sorted points plus the scale n."""

    points: np.ndarray
    n: int

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1:
            raise ValueError("points must be one-dimensional")
        if pts.size and (not np.all(np.isfinite(pts)) or np.any(np.diff(pts) < 0)):
            raise ValueError("points must be finite and sorted ascending")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        object.__setattr__(self, "points", pts)

    @property
    def count(self) -> int:
        return int(self.points.size)


def poisson_count(mean: float, rng: np.random.Generator) -> int:
    """One Poisson draw with the given mean (exact 0 for mean 0)."""
    if not np.isfinite(mean) or mean < 0:
        raise ValueError("mean must be finite and nonnegative")
    if mean == 0.0:
        return 0
    return int(rng.poisson(mean))


def integrate_against(g, sample: PointSample) -> float:
    """Sum of g over the points of the sample, i.e. the integral of g dN.

    g is any vectorised function with compact support; piecewise-constant
    atoms evaluate with the left-closed right-open convention.
    """
    if sample.count == 0:
        return 0.0
    return float(np.sum(g(sample.points)))


def merge_samples(a: PointSample, b: PointSample) -> PointSample:
    """Superpose two independent realisations; scales add."""
    pts = np.sort(np.concatenate([a.points, b.points]))
    return PointSample(pts, a.n + b.n)
