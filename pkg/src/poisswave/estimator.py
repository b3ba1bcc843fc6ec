"""Data-driven hard thresholding of empirical wavelet coefficients.

The threshold for atom lambda at level parameter gamma is

    eta = sqrt(2 gamma V ln n) + gamma ln n ||phi_lambda||_inf / (3 n)

where V is either the plug-in variance estimate itself ("simulation"
variant) or its upward-corrected version v_tilde ("theoretical"
variant).  A coefficient is kept when |beta_hat| >= eta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .pointprocess import PointSample
from .wavelets import BasisSpec, CoeffSet, atom_sup_norm, empirical_maps

VARIANTS = ("simulation", "theoretical")


@dataclass(frozen=True)
class ThresholdParams:
    """Everything the thresholding rule needs besides the data."""

    gamma: float
    n: int
    j0: int
    variant: str = "simulation"
    window: tuple[float, float] | None = None

    def __post_init__(self):
        if not (math.isfinite(self.gamma) and self.gamma >= 0.0):
            raise ValueError("gamma must be finite and >= 0")
        if self.n < 2:
            raise ValueError("n must be >= 2 (thresholds involve ln n)")
        if self.j0 < -1:
            raise ValueError("j0 must be >= -1")
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}")


def default_j0(n: int) -> int:
    """Finest retained level: largest j0 with 2^j0 <= n."""
    return int(math.floor(math.log2(n)))


def v_tilde(vhat: float, gamma: float, n: int, supnorm: float) -> float:
    """Upward-corrected variance estimate, valid with high probability."""
    ln = math.log(n)
    return vhat + math.sqrt(2.0 * gamma * ln * vhat * supnorm * supnorm / n ** 2) \
        + 3.0 * gamma * ln * supnorm * supnorm / n ** 2


def threshold(vhat: float, params: ThresholdParams, supnorm: float) -> float:
    """The threshold eta for one atom, given its plug-in variance and sup norm."""
    ln = math.log(params.n)
    v = vhat if params.variant == "simulation" \
        else v_tilde(vhat, params.gamma, params.n, supnorm)
    return math.sqrt(2.0 * params.gamma * v * ln) + params.gamma * ln * supnorm / (3.0 * params.n)


def threshold_coeffs(basis: BasisSpec, bhat: CoeffSet, vhat: CoeffSet,
                     params: ThresholdParams) -> CoeffSet:
    """Hard-threshold a coefficient map; keep when |beta_hat| >= eta."""
    kept = CoeffSet()
    for lam, b in bhat.items():
        if lam[0] > params.j0:
            continue
        eta = threshold(vhat[lam], params, atom_sup_norm(basis, lam))
        if abs(b) >= eta:
            kept[lam] = b
    return kept


def gamma_breakpoint(beta_hat: float, vhat: float, n: int, supnorm: float) -> float:
    """The largest gamma at which the coefficient is still kept.

    Solves sqrt(2 gamma vhat ln n) + gamma ln n supnorm / (3 n) = |beta_hat|
    for gamma (plug-in threshold); the rule keeps for all gamma <= the root.
    """
    if supnorm <= 0.0:
        raise ValueError("sup norm must be positive")
    a = math.sqrt(2.0 * vhat * math.log(n))
    b = math.log(n) * supnorm / (3.0 * n)
    x = abs(beta_hat)
    # quadratic in sqrt(gamma): b g + a sqrt(g) - x = 0; the rationalised
    # root avoids cancellation when b x is small relative to a^2
    root = 2.0 * x / (a + math.sqrt(a * a + 4.0 * b * x))
    return root * root


def estimation_window(basis: BasisSpec, sample: PointSample,
                      signal=None) -> tuple[float, float]:
    """Observation hull, widened by one coarse-atom envelope on each side.

    If the signal is given and has finite support, the hull also covers
    that support, so empty or one-sided realisations still produce a
    usable window.
    """
    lo = hi = None
    if sample.count:
        lo, hi = float(sample.points[0]), float(sample.points[-1])
    if signal is not None:
        slo, shi = signal.support
        if math.isfinite(slo):
            lo = slo if lo is None else min(lo, slo)
        if math.isfinite(shi):
            hi = shi if hi is None else max(hi, shi)
    if lo is None:
        raise ValueError("empty sample and no finite signal support: no window")
    width = basis.envelope[1] - basis.envelope[0]
    return lo - width, hi + width


def estimate(sample: PointSample, basis: BasisSpec,
             params: ThresholdParams) -> CoeffSet:
    """Full pipeline: empirical maps on the window, then hard thresholding.

    Pass the result to wavelets.reconstruct for a function-domain estimate.
    """
    window = params.window
    if window is None:
        window = estimation_window(basis, sample)
    bhat, vhat = empirical_maps(basis, sample, window, params.j0)
    return threshold_coeffs(basis, bhat, vhat, params)
