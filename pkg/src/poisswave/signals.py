"""The nine built-in test intensities and the two-Gaussian family.

Every signal exposes an exact pdf, an exact (closed form) cdf, and
inverse-cdf sampling.  Quantiles are analytic where a closed form
exists, otherwise bracketed root finding on the cdf.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import brentq
from scipy.special import ndtr, ndtri

from .pointprocess import PointSample

_SQRT2PI = math.sqrt(2.0 * math.pi)

# Blocks / Bumps parameter rows, verbatim.
BLOCKS_P = np.array([0.1, 0.13, 0.15, 0.23, 0.25, 0.4, 0.44, 0.65, 0.76, 0.78, 0.81])
BLOCKS_H = np.array([4.0, -5.0, 3.0, -4.0, 5.0, -4.2, 2.1, 4.3, -3.1, 2.1, -4.2])
BUMPS_P = BLOCKS_P  # Bumps reuses the Blocks locations
BUMPS_G = np.array([4.0, 5.0, 3.0, 4.0, 5.0, 4.2, 2.1, 4.3, 3.1, 5.1, 4.2])
BUMPS_W = np.array([0.005, 0.005, 0.006, 0.01, 0.01, 0.03, 0.01, 0.01, 0.005, 0.008, 0.005])
BLOCKS_NORM = 3.551
BUMPS_NORM = 0.284


@dataclass(frozen=True)
class SignalSpec:
    """An analytic intensity: pdf, cdf, quantile and the norms used downstream."""

    name: str
    l1_norm: float
    sup_norm: float
    support: tuple[float, float]
    _pdf: Callable = field(repr=False)
    _cdf: Callable = field(repr=False)
    _quantile: Callable | None = field(repr=False, default=None)
    _tail: Callable | None = field(repr=False, default=None)

    def pdf(self, x):
        arr = np.atleast_1d(np.asarray(x, dtype=float))
        out = self._pdf(arr)
        return float(out[0]) if np.isscalar(x) or np.ndim(x) == 0 else out

    def cdf(self, x):
        arr = np.atleast_1d(np.asarray(x, dtype=float))
        out = self._cdf(arr)
        return float(out[0]) if np.isscalar(x) or np.ndim(x) == 0 else out

    def quantile(self, u):
        """x with cdf(x) = u * l1_norm, for u in (0, 1)."""
        u = np.asarray(u, dtype=float)
        if np.any((u <= 0.0) | (u >= 1.0)):
            raise ValueError("quantile defined on the open interval (0, 1)")
        if self._quantile is not None:
            return self._quantile(u)
        lo, hi = self.tail_window(1e-15)
        mass = self.l1_norm

        def solve(ui):
            return brentq(lambda x: self._cdf(np.float64(x)) - ui * mass, lo, hi,
                          xtol=1e-13, rtol=8.9e-16)

        return np.vectorize(solve, otypes=[float])(u)

    def tail_window(self, eps: float) -> tuple[float, float]:
        """A finite interval carrying all but at most eps of the mass."""
        if self._tail is not None:
            return self._tail(eps)
        return self.support


def eval_pdf(signal: SignalSpec, x):
    return signal.pdf(x)


def eval_cdf(signal: SignalSpec, x):
    return signal.cdf(x)


def sample_points(signal: SignalSpec, n: int, rng: np.random.Generator) -> PointSample:
    """One realisation of the process with intensity n * signal.pdf.

    The total count is Poisson(n * l1_norm); positions are i.i.d. draws
    from pdf / l1_norm obtained by inverting the cdf.
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    count = int(rng.poisson(n * signal.l1_norm))
    if count == 0:
        return PointSample(np.empty(0), n)
    u = rng.random(count)
    # keep u strictly inside (0, 1); the boundary has probability zero anyway
    u = np.clip(u, 1e-16, 1.0 - 1e-16)
    pts = np.sort(np.asarray(signal.quantile(u), dtype=float))
    return PointSample(pts, n)


# ---------------------------------------------------------------------------
# constructors


def _piecewise_density(name, edges, heights, tail=None):
    """Signal with piecewise-constant pdf (left-closed right-open pieces)."""
    edges = np.asarray(edges, dtype=float)
    heights = np.asarray(heights, dtype=float)
    widths = np.diff(edges)
    cum = np.concatenate([[0.0], np.cumsum(heights * widths)])
    mass = float(cum[-1])

    def pdf(x):
        idx = np.searchsorted(edges, x, side="right") - 1
        inside = (idx >= 0) & (idx < len(heights))
        out = np.zeros_like(x)
        out[inside] = heights[idx[inside]]
        return out

    def cdf(x):
        idx = np.clip(np.searchsorted(edges, x, side="right") - 1, 0, len(heights) - 1)
        out = cum[idx] + heights[idx] * (np.clip(x, edges[0], edges[-1]) - edges[idx])
        return np.where(x < edges[0], 0.0, np.where(x >= edges[-1], mass, out))

    def quantile(u):
        target = u * mass
        idx = np.clip(np.searchsorted(cum, target, side="right") - 1, 0, len(heights) - 1)
        # skip zero-height pieces: move forward to the piece actually holding the mass
        while np.any(heights[idx] == 0.0):
            idx = np.where(heights[idx] == 0.0, idx + 1, idx)
        return edges[idx] + (target - cum[idx]) / heights[idx]

    return SignalSpec(name, mass, float(heights.max()), (float(edges[0]), float(edges[-1])),
                      pdf, cdf, quantile, tail)


def _normal_mixture(name, weights, means, sigmas, tail_sigmas=8.0):
    weights = np.asarray(weights, dtype=float)
    means = np.asarray(means, dtype=float)
    sigmas = np.asarray(sigmas, dtype=float)

    def pdf(x):
        z = (x[..., None] - means) / sigmas
        return np.sum(weights / (sigmas * _SQRT2PI) * np.exp(-0.5 * z * z), axis=-1)

    def cdf(x):
        z = (x[..., None] - means) / sigmas
        return np.sum(weights * ndtr(z), axis=-1)

    quantile = None
    if len(weights) == 1:
        m, s = float(means[0]), float(sigmas[0])
        quantile = lambda u: m + s * ndtri(u)

    def tail(eps):
        return (float(np.min(means - tail_sigmas * sigmas)),
                float(np.max(means + tail_sigmas * sigmas)))

    sup = float(np.max(pdf(means)))
    return SignalSpec(name, float(weights.sum()), sup, (-math.inf, math.inf),
                      pdf, cdf, quantile, tail)


def _make_comb():
    # block k has height 32/(k 2^k) on [k^2/32, (k^2+k)/32] and mass 2^-k;
    # truncate once the remaining mass drops below 1e-12 of the total
    kmax = 45
    ks = np.arange(1, kmax + 1)
    edges = []
    heights = []
    for k in ks:
        edges.append(k * k / 32.0)
        edges.append((k * k + k) / 32.0)
        heights.append(32.0 / (k * 2.0 ** k))
        heights.append(0.0)  # gap before the next block
    edges.append((kmax * kmax + 2 * kmax + 1) / 32.0)
    sig = _piecewise_density("Comb", edges, heights)

    def tail(eps):
        k = max(1, math.ceil(-math.log2(max(eps, 1e-300))))
        k = min(k, kmax)
        return (0.0, (k * k + k) / 32.0)

    return SignalSpec(sig.name, sig.l1_norm, sig.sup_norm, (0.0, math.inf),
                      sig._pdf, sig._cdf, sig._quantile, tail)


def _make_beta05():
    def pdf(x):
        out = np.zeros_like(x)
        inside = (x > 0.0) & (x <= 1.0)
        out[inside] = 0.5 * x[inside] ** -0.5
        return out

    def cdf(x):
        return np.sqrt(np.clip(x, 0.0, 1.0))

    return SignalSpec("Beta0.5", 1.0, math.inf, (0.0, 1.0), pdf, cdf, lambda u: u * u)


def _make_beta4():
    def pdf(x):
        out = np.zeros_like(x)
        inside = x >= 1.0
        out[inside] = 3.0 * x[inside] ** -4.0
        return out

    def cdf(x):
        return np.where(x < 1.0, 0.0, 1.0 - np.maximum(x, 1.0) ** -3.0)

    def quantile(u):
        return (1.0 - u) ** (-1.0 / 3.0)

    def tail(eps):
        return (1.0, float(max(eps, 1e-300) ** (-1.0 / 3.0)))

    return SignalSpec("Beta4", 1.0, 3.0, (1.0, math.inf), pdf, cdf, quantile, tail)


def _make_bumps():
    p, g, w = BUMPS_P, BUMPS_G, BUMPS_W

    def raw_pdf(x):
        return np.sum(g * (1.0 + np.abs(x[..., None] - p) / w) ** -4.0, axis=-1)

    def anti(x):
        # antiderivative of each bump term, zero at its own peak
        d = x[..., None] - p
        return np.sum(g * (w / 3.0) * np.sign(d) * (1.0 - (1.0 + np.abs(d) / w) ** -3.0),
                      axis=-1)

    a0 = anti(np.float64(0.0))
    mass = float(anti(np.float64(1.0)) - a0) / BUMPS_NORM

    def pdf(x):
        out = np.zeros_like(x)
        inside = (x >= 0.0) & (x <= 1.0)
        out[inside] = raw_pdf(x[inside]) / BUMPS_NORM
        return out

    def cdf(x):
        return (anti(np.clip(x, 0.0, 1.0)) - a0) / BUMPS_NORM

    sup = float(raw_pdf(p).max()) / BUMPS_NORM
    return SignalSpec("Bumps", mass, sup, (0.0, 1.0), pdf, cdf, None)


def _make_blocks():
    p, h = BLOCKS_P, BLOCKS_H
    edges = np.concatenate([[0.0], p, [1.0]])
    levels = (2.0 + np.concatenate([[0.0], np.cumsum(h)])) / BLOCKS_NORM
    return _piecewise_density("Blocks", edges, levels)


def gauss_mixture(d: float) -> SignalSpec:
    """The f_d family: two unit-variance Gaussians at 0 and d, weights 1/2."""
    return _normal_mixture(f"GaussMix(d={d:g})", [0.5, 0.5], [0.0, float(d)], [1.0, 1.0])


SIGNALS: dict[str, SignalSpec] = {
    "Haar1": _piecewise_density("Haar1", [0.0, 1.0], [1.0]),
    "Haar2": _piecewise_density("Haar2", [0.0, 0.125, 0.25, 1.0], [1.5, 0.5, 1.0]),
    "Blocks": _make_blocks(),
    "Comb": _make_comb(),
    "Gauss1": _normal_mixture("Gauss1", [1.0], [0.5], [0.25]),
    "Gauss2": _normal_mixture("Gauss2", [0.25, 0.75], [0.5, 5.0], [0.25, 0.25]),
    "Beta0.5": _make_beta05(),
    "Beta4": _make_beta4(),
    "Bumps": _make_bumps(),
}


def get_signal(name: str) -> SignalSpec:
    try:
        return SIGNALS[name]
    except KeyError:
        raise KeyError(f"unknown signal {name!r}; choose from {sorted(SIGNALS)}") from None
