"""Haar and piecewise-constant biorthogonal spline bases.

Analysis atoms are exact piecewise-constant functions, so empirical and
true coefficients are computed exactly (the latter from the signal's
analytic cdf).  Synthesis atoms for the spline pair are tabulated on a
dyadic grid by the cascade algorithm and evaluated by linear
interpolation; Haar synthesis is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np


class LambdaIndex(NamedTuple):
    """Wavelet index (j, k); j = -1 tags scaling atoms, j >= 0 wavelets."""

    j: int
    k: int


class CoeffSet(dict):
    """Sparse map LambdaIndex -> real; absent entries are zero."""

    def __missing__(self, key):
        return 0.0

    def l2_sq(self) -> float:
        return float(sum(v * v for v in self.values()))

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("j,k,value\n")
            for (j, k) in sorted(self):
                fh.write(f"{j},{k},{self[(j, k)]:.17g}\n")

    @classmethod
    def from_csv(cls, path) -> "CoeffSet":
        out = cls()
        with open(path) as fh:
            header = fh.readline()
            if header.strip() != "j,k,value":
                raise ValueError("expected header 'j,k,value'")
            for line in fh:
                j, k, v = line.strip().split(",")
                out[LambdaIndex(int(j), int(k))] = float(v)
        return out


@dataclass(frozen=True)
class PiecewiseConstant:
    """Compactly supported step function; pieces left-closed right-open."""

    breakpoints: np.ndarray  # m+1 sorted edges
    values: np.ndarray       # m piece values; zero outside [first, last)

    def __post_init__(self):
        bp = np.asarray(self.breakpoints, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        if bp.size != vals.size + 1 or np.any(np.diff(bp) <= 0):
            raise ValueError("need m+1 strictly increasing edges for m values")
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        idx = np.searchsorted(self.breakpoints, x, side="right") - 1
        inside = (idx >= 0) & (idx < self.values.size)
        out = np.zeros_like(x)
        out[inside] = self.values[idx[inside]]
        return out

    @property
    def support(self) -> tuple[float, float]:
        return float(self.breakpoints[0]), float(self.breakpoints[-1])

    @property
    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))


class _Pieces(NamedTuple):
    """Dyadic-grid description of a base atom: value c[i] on [(m0+i)/q, (m0+i+1)/q)."""

    q: int
    m0: int
    c: np.ndarray


def _pieces_to_pc(p: _Pieces) -> PiecewiseConstant:
    edges = (p.m0 + np.arange(p.c.size + 1)) / p.q
    return PiecewiseConstant(edges, p.c)


# CDF spline pair with box analysis scaling: the 10-tap dual low-pass mask,
# exact dyadic rationals, taps at offsets -4..5 (mask sums to 2).
_SPLINE_MASK = np.array([3, -3, -22, 22, 128, 128, 22, -22, -3, 3], dtype=float) / 128.0
_SPLINE_OFF = -4
# analysis wavelet psi(x) = sum_k (-1)^k mask[1-k] phi(2x-k): values on the half grid
_SPLINE_PSI = np.array([3 / 128, 3 / 128, -11 / 64, -11 / 64, 1.0,
                        -1.0, 11 / 64, 11 / 64, -3 / 128, -3 / 128])


def _cascade_table(mask: np.ndarray, off: int, depth: int) -> tuple[np.ndarray, np.ndarray]:
    """Dyadic-grid values of the scaling function refined by the given mask."""
    L = mask.size
    interior = np.arange(off + 1, off + L - 1)
    A = np.zeros((interior.size, interior.size))
    for ai, a in enumerate(interior):
        for bi, b in enumerate(interior):
            kk = 2 * a - b
            if off <= kk < off + L:
                A[ai, bi] = mask[kk - off]
    eigvals, eigvecs = np.linalg.eig(A)
    v = np.real(eigvecs[:, np.argmin(np.abs(eigvals - 1.0))])
    cur = np.zeros(L)
    cur[1:-1] = v
    cur /= cur.sum()  # partition of unity at the integers
    for d in range(1, depth + 1):
        prev = cur
        cur = np.zeros((L - 1) * 2 ** d + 1)
        i = np.arange(cur.size)
        for ki in range(L):
            ip = i - ki * 2 ** (d - 1)
            ok = (ip >= 0) & (ip < prev.size)
            cur[ok] += mask[ki] * prev[ip[ok]]
    x = off + np.arange(cur.size) / 2.0 ** depth
    return x, cur


class BasisSpec:
    """Analysis pair (phi, psi) plus synthesis evaluators and index envelope."""

    def __init__(self, kind: str, depth: int = 12):
        self.kind = kind
        self.depth = depth
        if kind == "haar":
            self.orthonormal = True
            self._phi_pieces = _Pieces(1, 0, np.array([1.0]))
            self._psi_pieces = _Pieces(2, 0, np.array([1.0, -1.0]))
            self.envelope = (0.0, 1.0)
        elif kind == "spline15":
            self.orthonormal = False
            self._phi_pieces = _Pieces(1, 0, np.array([1.0]))
            self._psi_pieces = _Pieces(2, -4, _SPLINE_PSI.copy())
            self.envelope = (-4.0, 5.0)
            grid, table = _cascade_table(_SPLINE_MASK, _SPLINE_OFF, depth)
            self._phi_grid, self._phi_table = grid, table
            # psi~(x) = phi~(2x) - phi~(2x-1) on [-2, 3]; exact index arithmetic
            m = 2 ** depth
            i = np.arange(5 * m + 1)
            a = np.zeros(i.size)
            hi = 2 * i
            ok = hi < table.size
            a[ok] = table[hi[ok]]
            b = np.zeros(i.size)
            lo = 2 * i - m
            ok = (lo >= 0) & (lo < table.size)
            b[ok] = table[lo[ok]]
            self._psi_grid = -2.0 + i / m
            self._psi_table = a - b
        else:
            raise ValueError(f"unknown basis kind {kind!r}")
        self.phi = _pieces_to_pc(self._phi_pieces)
        self.psi = _pieces_to_pc(self._psi_pieces)
        self._frame_bounds: tuple[float, float] | None = (1.0, 1.0) if self.orthonormal else None

    # synthesis-side evaluation -------------------------------------------------

    def synth_phi(self, x):
        if self.kind == "haar":
            return self.phi(x)
        x = np.asarray(x, dtype=float)
        out = np.interp(x, self._phi_grid, self._phi_table, left=0.0, right=0.0)
        return np.where((x < self._phi_grid[0]) | (x > self._phi_grid[-1]), 0.0, out)

    def synth_psi(self, x):
        if self.kind == "haar":
            return self.psi(x)
        x = np.asarray(x, dtype=float)
        out = np.interp(x, self._psi_grid, self._psi_table, left=0.0, right=0.0)
        return np.where((x < self._psi_grid[0]) | (x > self._psi_grid[-1]), 0.0, out)

    @property
    def synth_phi_support(self) -> tuple[float, float]:
        if self.kind == "haar":
            return (0.0, 1.0)
        return (float(self._phi_grid[0]), float(self._phi_grid[-1]))

    @property
    def synth_psi_support(self) -> tuple[float, float]:
        if self.kind == "haar":
            return (0.0, 1.0)
        return (float(self._psi_grid[0]), float(self._psi_grid[-1]))

    def frame_bounds(self, n_sets: int = 1000, seed: int = 7) -> tuple[float, float]:
        """Estimated (c1, c2) with c1 ||c||^2 <= ||synthesised||_2^2 <= c2 ||c||^2."""
        if self._frame_bounds is None:
            rng = np.random.default_rng(seed)
            lo = hi = None
            for _ in range(n_sets):
                coeffs = random_coeffset(rng)
                ratio = _synth_energy(self, coeffs) / coeffs.l2_sq()
                lo = ratio if lo is None else min(lo, ratio)
                hi = ratio if hi is None else max(hi, ratio)
            self._frame_bounds = (lo, hi)
        return self._frame_bounds

    def __repr__(self):
        return f"BasisSpec({self.kind!r})"


_BASES: dict[str, BasisSpec] = {}


def get_basis(kind: str) -> BasisSpec:
    """Shared immutable basis instance (cascade tables built once)."""
    if kind not in _BASES:
        _BASES[kind] = BasisSpec(kind)
    return _BASES[kind]


def random_coeffset(rng: np.random.Generator, max_level: int = 3, span: int = 8) -> CoeffSet:
    """Small random coefficient set; used by frame/Parseval diagnostics."""
    out = CoeffSet()
    for _ in range(rng.integers(3, 12)):
        j = int(rng.integers(-1, max_level + 1))
        k = int(rng.integers(0, span))
        out[LambdaIndex(j, k)] = float(rng.normal())
    return out


def _synth_energy(basis: BasisSpec, coeffs: CoeffSet, cells_per_unit: int = 4096) -> float:
    """Midpoint-quadrature L2 norm squared of the synthesised function."""
    los, his = [], []
    for (j, k) in coeffs:
        slo, shi = (basis.synth_phi_support if j < 0 else basis.synth_psi_support)
        scale = 1.0 if j < 0 else 2.0 ** j
        los.append((slo + k) / scale)
        his.append((shi + k) / scale)
    lo, hi = min(los), max(his)
    m = max(64, int(math.ceil((hi - lo) * cells_per_unit)))
    dx = (hi - lo) / m
    x = lo + (np.arange(m) + 0.5) * dx
    vals = reconstruct(basis, coeffs, x)
    return float(np.sum(vals * vals) * dx)


# atom-level operations ---------------------------------------------------------


def analysis_atom(basis: BasisSpec, lam: LambdaIndex) -> PiecewiseConstant:
    """The exact piecewise-constant analysis atom phi_lambda."""
    j, k = lam
    if j < -1:
        raise ValueError("j must be >= -1")
    if j == -1:
        base = basis.phi
        return PiecewiseConstant(base.breakpoints + k, base.values)
    base = basis.psi
    return PiecewiseConstant((base.breakpoints + k) / 2.0 ** j, base.values * 2.0 ** (j / 2.0))


def atom_sup_norm(basis: BasisSpec, lam: LambdaIndex) -> float:
    j = lam[0]
    if j == -1:
        return basis.phi.sup_norm
    return basis.psi.sup_norm * 2.0 ** (j / 2.0)


def true_coeff(basis: BasisSpec, lam: LambdaIndex, signal) -> float:
    """Integral of phi_lambda against the signal, exact via the analytic cdf."""
    atom = analysis_atom(basis, lam)
    mass = np.diff(signal.cdf(atom.breakpoints))
    return float(np.dot(atom.values, mass))


def true_variance(basis: BasisSpec, lam: LambdaIndex, signal, n: int) -> float:
    """Variance of the empirical coefficient: (1/n) * integral of phi_lambda^2 f."""
    atom = analysis_atom(basis, lam)
    mass = np.diff(signal.cdf(atom.breakpoints))
    return float(np.dot(atom.values ** 2, mass)) / n


def empirical_coeff(basis: BasisSpec, lam: LambdaIndex, sample) -> float:
    """(1/n) * sum of phi_lambda over the sample points."""
    if sample.count == 0:
        return 0.0
    atom = analysis_atom(basis, lam)
    return float(np.sum(atom(sample.points))) / sample.n


def empirical_variance(basis: BasisSpec, lam: LambdaIndex, sample) -> float:
    """(1/n^2) * sum of phi_lambda^2 over the sample points."""
    if sample.count == 0:
        return 0.0
    atom = analysis_atom(basis, lam)
    return float(np.sum(atom(sample.points) ** 2)) / sample.n ** 2


def _k_range(basis: BasisSpec, window: tuple[float, float], j: int) -> tuple[int, int]:
    """Inclusive k range whose envelope support meets [a, b) at level j."""
    a, b = window
    e_lo, e_hi = basis.envelope
    scale = 1.0 if j < 0 else 2.0 ** j
    kmin = math.floor(a * scale - e_hi) + 1
    kmax = math.ceil(b * scale - e_lo) - 1
    return kmin, kmax


def active_indices(basis: BasisSpec, window: tuple[float, float], j0: int) -> list[LambdaIndex]:
    """All lambda with j <= j0 whose atom envelope intersects the window."""
    if window[1] <= window[0]:
        raise ValueError("window must have positive width")
    if j0 < -1:
        raise ValueError("j0 must be >= -1")
    out = []
    for j in range(-1, j0 + 1):
        kmin, kmax = _k_range(basis, window, j)
        out.extend(LambdaIndex(j, k) for k in range(kmin, kmax + 1))
    return out


def reconstruct(basis: BasisSpec, coeffs: CoeffSet, grid: np.ndarray) -> np.ndarray:
    """Synthesise sum of c_lambda * synth-atom_lambda at sorted grid points."""
    grid = np.asarray(grid, dtype=float)
    out = np.zeros_like(grid)
    for (j, k), c in coeffs.items():
        if c == 0.0:
            continue
        if j < 0:
            slo, shi = basis.synth_phi_support
            lo, hi = slo + k, shi + k
            sel = slice(np.searchsorted(grid, lo), np.searchsorted(grid, hi, side="right"))
            out[sel] += c * basis.synth_phi(grid[sel] - k)
        else:
            scale = 2.0 ** j
            slo, shi = basis.synth_psi_support
            lo, hi = (slo + k) / scale, (shi + k) / scale
            sel = slice(np.searchsorted(grid, lo), np.searchsorted(grid, hi, side="right"))
            out[sel] += c * 2.0 ** (j / 2.0) * basis.synth_psi(grid[sel] * scale - k)
    return out


# batched maps used by the estimator and the risk curves ------------------------


def empirical_maps(basis: BasisSpec, sample, window: tuple[float, float],
                   j0: int) -> tuple[CoeffSet, CoeffSet]:
    """Empirical coefficients and empirical variances for every active atom
    touched by at least one point; untouched atoms are exact zeros and omitted."""
    bhat, vhat = CoeffSet(), CoeffSet()
    pts = sample.points
    n = sample.n
    if pts.size == 0:
        return bhat, vhat
    for j in range(-1, j0 + 1):
        pieces = basis._phi_pieces if j < 0 else basis._psi_pieces
        scale = 1.0 if j < 0 else 2.0 ** j
        amp = 1.0 if j < 0 else 2.0 ** (j / 2.0)
        kmin, kmax = _k_range(basis, window, j)
        nk = kmax - kmin + 1
        if nk <= 0:
            continue
        t = np.floor(pieces.q * pts * scale).astype(np.int64)
        acc1 = np.zeros(nk)
        acc2 = np.zeros(nk)
        for i, cm in enumerate(pieces.c):
            num = t - (pieces.m0 + i)
            sel = num % pieces.q == 0
            kk = num[sel] // pieces.q
            ok = (kk >= kmin) & (kk <= kmax)
            idx = (kk[ok] - kmin).astype(np.intp)
            if idx.size:
                acc1 += np.bincount(idx, weights=np.full(idx.size, cm), minlength=nk)
                acc2 += np.bincount(idx, weights=np.full(idx.size, cm * cm), minlength=nk)
        hit = np.nonzero(acc2 > 0.0)[0]
        for i in hit:
            lam = LambdaIndex(j, kmin + int(i))
            bhat[lam] = amp * acc1[i] / n
            vhat[lam] = amp * amp * acc2[i] / (n * n)
    return bhat, vhat


def true_maps(basis: BasisSpec, signal, window: tuple[float, float], j0: int,
              n: int) -> tuple[CoeffSet, CoeffSet]:
    """True coefficients and true variances for every active atom, computed
    exactly from the analytic cdf; exact zeros are omitted."""
    beta, var = CoeffSet(), CoeffSet()
    for j in range(-1, j0 + 1):
        pieces = basis._phi_pieces if j < 0 else basis._psi_pieces
        scale = 1.0 if j < 0 else 2.0 ** j
        amp = 1.0 if j < 0 else 2.0 ** (j / 2.0)
        kmin, kmax = _k_range(basis, window, j)
        if kmax < kmin:
            continue
        ks = np.arange(kmin, kmax + 1)
        edges = (ks[None, :] + (pieces.m0 + np.arange(pieces.c.size + 1))[:, None] / pieces.q) / scale
        F = signal.cdf(edges.ravel()).reshape(edges.shape)
        mass = np.diff(F, axis=0)
        b = amp * (pieces.c @ mass)
        v = amp * amp * ((pieces.c ** 2) @ mass) / n
        keep = (b != 0.0) | (v != 0.0)
        for i in np.nonzero(keep)[0]:
            lam = LambdaIndex(j, int(ks[i]))
            beta[lam] = float(b[i])
            var[lam] = float(v[i])
    return beta, var
