"""Oracle risk, exact stepwise risk-ratio curves, and intensity-class checks.

The central object is the exact ratio curve

    R_n(gamma) = sum (beta_tilde - beta)^2 / sum min(beta^2, V)

as a function of the threshold parameter gamma.  Because the plug-in
threshold is strictly increasing in gamma, each empirical coefficient is
dropped at one computable breakpoint, so the whole curve is built in
closed form with no gamma discretisation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .estimator import estimation_window, gamma_breakpoint
from .pointprocess import PointSample
from .signals import SignalSpec
from .wavelets import (BasisSpec, CoeffSet, LambdaIndex, analysis_atom,
                       atom_sup_norm, empirical_maps, true_maps)


@dataclass(frozen=True)
class StepCurve:
    """Right-continuous step function of gamma >= 0.

    values[0] applies on [0, breakpoints[0]), values[i] on
    [breakpoints[i-1], breakpoints[i]), values[-1] on [breakpoints[-1], inf).
    """

    breakpoints: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        bp = np.asarray(self.breakpoints, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        if vals.size != bp.size + 1:
            raise ValueError("need len(breakpoints) + 1 values")
        if bp.size and (bp[0] <= 0.0 or np.any(np.diff(bp) <= 0)):
            raise ValueError("breakpoints must be strictly increasing and positive")
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)

    def __call__(self, gamma):
        gamma = np.asarray(gamma, dtype=float)
        out = self.values[np.searchsorted(self.breakpoints, gamma, side="right")]
        return float(out) if out.ndim == 0 else out

    def to_csv(self, path, config_comment: str | None = None) -> None:
        with open(path, "w") as fh:
            if config_comment is not None:
                fh.write(f"# {config_comment}\n")
            fh.write("gamma_from,value\n")
            starts = np.concatenate([[0.0], self.breakpoints])
            for g, v in zip(starts, self.values):
                fh.write(f"{g:.17g},{v:.17g}\n")

    @classmethod
    def from_csv(cls, path) -> "StepCurve":
        starts, vals = [], []
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#") or line.startswith("gamma_from"):
                    continue
                g, v = line.split(",")
                starts.append(float(g))
                vals.append(float(v))
        if not starts or starts[0] != 0.0:
            raise ValueError("curve CSV must start at gamma_from=0")
        return cls(np.asarray(starts[1:]), np.asarray(vals))


@dataclass(frozen=True)
class RiskReport:
    """Per-replication risk summary for one estimate."""

    oracle: float
    coeff_risk: float
    l2_grid_risk: float
    kept_count: int
    tail_energy: float = 0.0


@dataclass(frozen=True)
class UniformGrid:
    """Uniform midpoint grid with m cells on [lo, hi]."""

    lo: float
    hi: float
    m: int

    def __post_init__(self):
        if not (self.hi > self.lo) or self.m < 1:
            raise ValueError("need hi > lo and at least one cell")

    @property
    def dx(self) -> float:
        return (self.hi - self.lo) / self.m

    @property
    def midpoints(self) -> np.ndarray:
        return self.lo + (np.arange(self.m) + 0.5) * self.dx


def oracle_risk(true_coeffs: CoeffSet, variances: CoeffSet) -> float:
    """Sum over the index set of min(beta^2, V)."""
    keys = set(true_coeffs) | set(variances)
    return float(sum(min(true_coeffs[k] ** 2, variances[k]) for k in keys))


def coeff_risk(kept: CoeffSet, true_coeffs: CoeffSet) -> float:
    """Sum over the union of supports of (kept - true)^2."""
    keys = set(kept) | set(true_coeffs)
    return float(sum((kept[k] - true_coeffs[k]) ** 2 for k in keys))


def risk_curve(sample: PointSample, signal: SignalSpec, basis: BasisSpec,
               n: int, j0: int,
               window: tuple[float, float] | None = None) -> StepCurve:
    """The exact ratio curve R_n(gamma) for one realisation.

    For each empirical coefficient the drop point gamma* is computed in
    closed form; the numerator starts at sum (beta_hat - beta)^2 (all
    kept) and at each gamma* the term is replaced by beta^2.
    """
    if window is None:
        window = estimation_window(basis, sample, signal)
    beta, var = true_maps(basis, signal, window, j0, n)
    oracle = oracle_risk(beta, var)
    if oracle <= 0.0:
        raise ValueError("zero oracle risk on the window: ratio undefined")
    bhat, vhat = empirical_maps(basis, sample, window, j0)

    base = 0.0  # terms constant in gamma: atoms never hit contribute beta^2
    for lam, b in beta.items():
        if lam not in bhat:
            base += b * b
    gstars, kept_terms, drop_terms = [], [], []
    for lam, bh in bhat.items():
        b = beta[lam]
        gstar = gamma_breakpoint(bh, vhat[lam], n, atom_sup_norm(basis, lam))
        if gstar <= 0.0:
            base += b * b
            continue
        gstars.append(gstar)
        kept_terms.append((bh - b) ** 2)
        drop_terms.append(b * b)
    order = np.argsort(gstars)
    gstars = np.asarray(gstars)[order]
    kept_terms = np.asarray(kept_terms)[order]
    drop_terms = np.asarray(drop_terms)[order]
    # piece value after i drops; sums of nonnegative terms keep the relative
    # error at machine precision even where the curve is small
    suffix = np.concatenate([np.cumsum(kept_terms[::-1])[::-1], [0.0]])
    prefix = np.concatenate([[0.0], np.cumsum(drop_terms)])
    values = base + suffix + prefix
    bps, last = np.unique(gstars, return_index=True)
    counts = np.diff(np.concatenate([last, [gstars.size]]))
    idx = np.concatenate([[0], last + counts])  # value index after merged drops
    return StepCurve(bps, values[idx] / oracle)


def average_curves(curves: list[StepCurve]) -> StepCurve:
    """Exact pointwise mean over the union of breakpoints."""
    if not curves:
        raise ValueError("need at least one curve")
    union = np.unique(np.concatenate([c.breakpoints for c in curves] + [np.empty(0)]))
    m = union.size
    acc = np.zeros(m + 1)
    for c in curves:
        idx = np.concatenate([[0], np.searchsorted(c.breakpoints, union, side="right")])
        acc += c.values[idx]
    return StepCurve(union, acc / len(curves))


def gamma_min(curve: StepCurve, gamma_cap: float = 400.0, rtol: float = 1e-9) -> float:
    """Left endpoint of the first piece attaining the minimum on (0, cap].

    Piece values within rtol (relative) of the minimum count as ties and
    are broken toward smaller gamma; a constant curve gives 0.
    """
    if gamma_cap <= 0.0:
        raise ValueError("gamma_cap must be positive")
    starts = np.concatenate([[0.0], curve.breakpoints])
    in_range = starts <= gamma_cap
    vals = curve.values[in_range]
    vmin = float(np.min(vals))
    tol = rtol * max(abs(vmin), 1.0)
    first = int(np.nonzero(vals <= vmin + tol)[0][0])
    return float(starts[first])


def l2_grid_risk(estimate_grid: np.ndarray, signal: SignalSpec,
                 grid: UniformGrid) -> float:
    """Midpoint quadrature of (estimate - f)^2 over the grid window."""
    est = np.asarray(estimate_grid, dtype=float)
    if est.size != grid.m:
        raise ValueError("estimate values must match the grid cells")
    diff = est - signal.pdf(grid.midpoints)
    return float(np.sum(diff * diff) * grid.dx)


def f_lambda(signal: SignalSpec, basis: BasisSpec, lam: LambdaIndex) -> float:
    """Signal mass over the support of the analysis atom phi_lambda."""
    lo, hi = analysis_atom(basis, lam).support
    return float(signal.cdf(hi) - signal.cdf(lo))


def class_membership_report(signal: SignalSpec, basis: BasisSpec, n: int,
                            R: float, probe_depth: int,
                            quad_cells: int = 1 << 20,
                            tail_tol: float = 1e-6) -> tuple[bool, list[str]]:
    """Membership test with reasons; see class_membership for the contract."""
    reasons = []
    if signal.l1_norm > R:
        reasons.append(f"L1 norm {signal.l1_norm:g} exceeds R={R:g}")
    if signal.sup_norm > R:
        reasons.append(f"sup norm {signal.sup_norm:g} exceeds R={R:g}")
    lo, hi = signal.tail_window(1e-13)
    grid = UniformGrid(lo, hi, quad_cells)
    f = signal.pdf(grid.midpoints)
    l2sq = float(np.sum(f * f) * grid.dx)
    if l2sq > R:
        reasons.append(f"squared L2 norm {l2sq:g} exceeds R={R:g}")
    floor = math.log(n) * math.log(math.log(n)) / n
    beta, _ = true_maps(basis, signal, (lo - 1.0, hi + 1.0), probe_depth, n)
    energy = 0.0
    for lam, b in beta.items():
        if b == 0.0:
            continue
        if lam[0] >= 0:
            energy += b * b
        if f_lambda(signal, basis, lam) < floor:
            reasons.append(f"mass condition fails at (j,k)={tuple(lam)}: "
                           f"F={f_lambda(signal, basis, lam):.3g} < {floor:.3g}")
            break
    coarse_energy = sum(b * b for (j, _), b in beta.items() if j < 0)
    unresolved = l2sq - coarse_energy - energy
    if unresolved > tail_tol * max(l2sq, 1.0):
        reasons.append(f"nonzero coefficients beyond probe depth {probe_depth}: "
                       f"unresolved energy {unresolved:.3g}")
    return not reasons, reasons


def class_membership(signal: SignalSpec, basis: BasisSpec, n: int, R: float,
                     probe_depth: int) -> bool:
    """True iff the three R-norm caps hold and every nonzero coefficient
    down to probe_depth sits on an atom carrying mass >= ln n ln ln n / n."""
    ok, _ = class_membership_report(signal, basis, n, R, probe_depth)
    return ok
