"""Binned-count comparison methods: Anscombe plus universal Haar thresholding.

The pipeline bins the points on a window, applies y = 2 sqrt(N + 3/8) so
the noise level is approximately 1, hard-thresholds an orthonormal Haar
filter-bank transform at the universal level sigma sqrt(2 ln B), and
inverts back to an intensity on the bin grid.  A translation-invariant
variant averages the same denoiser over circular shifts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .pointprocess import PointSample


@dataclass(frozen=True)
class BinnedCounts:
    """Equal-width bin counts over a window, plus the process scale n."""

    window: tuple[float, float]
    counts: np.ndarray
    n: int
    dropped: int = 0

    def __post_init__(self):
        counts = np.asarray(self.counts)
        if counts.ndim != 1 or counts.size < 2 or counts.size & (counts.size - 1):
            raise ValueError("counts must be a 1-d array of power-of-2 length >= 2")
        if np.any(counts < 0):
            raise ValueError("counts must be nonnegative")
        object.__setattr__(self, "counts", counts.astype(np.int64))

    @property
    def B(self) -> int:
        return int(self.counts.size)


def bin_counts(sample: PointSample, window: tuple[float, float], B: int) -> BinnedCounts:
    """Histogram the points into B equal bins; outside points are dropped."""
    lo, hi = window
    if hi <= lo:
        raise ValueError("window must have positive width")
    if B < 2 or B & (B - 1):
        raise ValueError("B must be a power of 2, at least 2")
    pts = sample.points
    inside = (pts >= lo) & (pts < hi)
    idx = np.floor((pts[inside] - lo) / (hi - lo) * B).astype(np.int64)
    idx = np.minimum(idx, B - 1)  # guard the right edge against rounding
    counts = np.bincount(idx, minlength=B)
    return BinnedCounts((float(lo), float(hi)), counts, sample.n,
                        int(pts.size - inside.sum()))


def anscombe(counts: BinnedCounts) -> np.ndarray:
    """Variance-stabilising transform y_i = 2 sqrt(N_i + 3/8)."""
    return 2.0 * np.sqrt(counts.counts + 0.375)


def haar_transform(y: np.ndarray, coarse: int = 0) -> np.ndarray:
    """Orthonormal Haar filter bank down to 2^coarse approximation values.

    Output layout: [approx (2^coarse), details coarse, ..., details finest].
    """
    y = np.asarray(y, dtype=float)
    B = y.size
    if B & (B - 1) or B < 1:
        raise ValueError("length must be a power of 2")
    out = np.empty(B)
    a = y.copy()
    pos = B
    while a.size > 1 << coarse:
        even, odd = a[0::2], a[1::2]
        d = (even - odd) / math.sqrt(2.0)
        a = (even + odd) / math.sqrt(2.0)
        pos -= d.size
        out[pos:pos + d.size] = d
    out[:pos] = a
    return out


def haar_inverse(c: np.ndarray, coarse: int = 0) -> np.ndarray:
    """Inverse of haar_transform."""
    c = np.asarray(c, dtype=float)
    B = c.size
    a = c[:1 << coarse].copy()
    pos = 1 << coarse
    while pos < B:
        d = c[pos:pos + a.size]
        even = (a + d) / math.sqrt(2.0)
        odd = (a - d) / math.sqrt(2.0)
        a = np.empty(2 * a.size)
        a[0::2], a[1::2] = even, odd
        pos += d.size
    return a


def universal_haar_denoise(y: np.ndarray, sigma: float = 1.0,
                           coarse: int = 0) -> np.ndarray:
    """Hard-threshold all detail coefficients at sigma sqrt(2 ln B)."""
    y = np.asarray(y, dtype=float)
    c = haar_transform(y, coarse)
    thr = sigma * math.sqrt(2.0 * math.log(y.size))
    keep = 1 << coarse
    detail = c[keep:]
    detail[np.abs(detail) <= thr] = 0.0
    return haar_inverse(c, coarse)


def inverse_anscombe_to_intensity(yhat: np.ndarray, window: tuple[float, float],
                                  B: int, n: int) -> np.ndarray:
    """Map denoised Anscombe values back to a binwise intensity estimate.

    Uses the plain algebraic inverse with the positive part:
    f_i = max(0, (y_i/2)^2 - 3/8) * B / (n |window|).
    """
    yhat = np.asarray(yhat, dtype=float)
    width = window[1] - window[0]
    return np.maximum(0.0, (yhat / 2.0) ** 2 - 0.375) * B / (n * width)


def cycle_spin(counts: BinnedCounts, denoiser, shifts: int) -> np.ndarray:
    """Average unshift(denoiser(shift(y, s))) over s = 0, ..., shifts-1.

    The shift stride is B // shifts, so shifts must divide B.
    """
    B = counts.B
    if shifts < 1 or B % shifts:
        raise ValueError("shifts must divide the number of bins")
    stride = B // shifts
    y = anscombe(counts)
    acc = np.zeros(B)
    for s in range(shifts):
        rolled = np.roll(y, s * stride)
        acc += np.roll(denoiser(rolled), -s * stride)
    return acc / shifts


def default_bins(n: int) -> int:
    """Power of two nearest to sqrt(n), at least 2.

    With about n points this keeps the mean count per bin near sqrt(n),
    large enough for the variance stabilisation to hold while still
    tracking the main features of a smooth intensity.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    return max(2, 1 << round(0.5 * math.log2(n)))


def anscombe_uni(sample: PointSample, window: tuple[float, float],
                 B: int | None = None, translation_invariant: bool = False,
                 coarse: int = 0) -> np.ndarray:
    """Full baseline pipeline; returns the binwise intensity estimate."""
    if B is None:
        B = default_bins(sample.n)
    counts = bin_counts(sample, window, B)
    denoiser = lambda y: universal_haar_denoise(y, 1.0, coarse)
    if translation_invariant:
        yhat = cycle_spin(counts, denoiser, B)
    else:
        yhat = denoiser(anscombe(counts))
    return inverse_anscombe_to_intensity(yhat, window, B, sample.n)
