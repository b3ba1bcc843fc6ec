import math

import numpy as np
import pytest

from poisswave.pointprocess import PointSample
from poisswave.rng import substream
from poisswave.signals import SIGNALS, sample_points
from poisswave.wavelets import (CoeffSet, LambdaIndex, _synth_energy,
                                active_indices, analysis_atom, atom_sup_norm,
                                empirical_coeff, empirical_maps,
                                empirical_variance, get_basis, random_coeffset,
                                reconstruct, true_coeff, true_maps,
                                true_variance)

HAAR = get_basis("haar")
SPLINE = get_basis("spline15")


def test_coeffset_missing_and_csv(tmp_path):
    c = CoeffSet()
    assert c[LambdaIndex(3, 5)] == 0.0
    c[LambdaIndex(-1, 0)] = 1.25
    c[LambdaIndex(2, -3)] = -0.5
    path = tmp_path / "c.csv"
    c.to_csv(path)
    back = CoeffSet.from_csv(path)
    assert back == c
    assert c.l2_sq() == pytest.approx(1.25 ** 2 + 0.25)


def test_analysis_atom_scaling():
    a = analysis_atom(HAAR, LambdaIndex(2, 3))
    assert a.support == (0.75, 1.0)
    assert a.sup_norm == pytest.approx(2.0)
    assert atom_sup_norm(HAAR, LambdaIndex(2, 3)) == pytest.approx(2.0)
    b = analysis_atom(SPLINE, LambdaIndex(0, 1))
    assert b.support == (-1.0, 4.0)
    with pytest.raises(ValueError):
        analysis_atom(HAAR, LambdaIndex(-2, 0))


def test_haar_atom_values():
    psi = analysis_atom(HAAR, LambdaIndex(1, 0))
    x = np.array([0.1, 0.3, 0.6])
    np.testing.assert_allclose(psi(x), [math.sqrt(2), -math.sqrt(2), 0.0])


def test_true_coeff_examples():
    assert true_coeff(HAAR, LambdaIndex(2, 0), SIGNALS["Haar2"]) == pytest.approx(0.25)
    assert true_coeff(HAAR, LambdaIndex(-1, 0), SIGNALS["Haar1"]) == pytest.approx(1.0)
    # all wavelet coefficients of the flat signal vanish
    for j in range(0, 5):
        for k in range(0, 2 ** j):
            assert true_coeff(HAAR, LambdaIndex(j, k), SIGNALS["Haar1"]) == 0.0


def test_true_variance():
    # flat unit signal: V = 2^j * 2^-j / n = 1/n for every atom inside [0,1]
    for lam in (LambdaIndex(-1, 0), LambdaIndex(0, 0), LambdaIndex(3, 4)):
        assert true_variance(HAAR, lam, SIGNALS["Haar1"], 256) == pytest.approx(1 / 256)


def test_active_indices_counts():
    assert len(active_indices(HAAR, (0.0, 1.0), 2)) == 8
    # spline envelope is 9 units wide: 9 scaling atoms touch [0,1)
    lams = active_indices(SPLINE, (0.0, 1.0), -1)
    assert len(lams) == 9
    assert {k for _, k in lams} == set(range(-4, 5))
    with pytest.raises(ValueError):
        active_indices(HAAR, (1.0, 0.0), 2)


def test_spline_psi_vanishing_moments():
    bp = SPLINE.psi.breakpoints
    c = SPLINE.psi.values
    for deg in range(5):
        mom = np.sum(c * (bp[1:] ** (deg + 1) - bp[:-1] ** (deg + 1)) / (deg + 1))
        assert abs(mom) < 1e-12


def test_spline_mask_duality():
    # the dual low-pass mask against the box mask: sum_k h_k ht_{k+2m} = 2 delta_m
    h = np.zeros(12)
    h[4:6] = 1.0  # box filter at offsets 0, 1
    ht = np.zeros(12)
    ht[0:10] = np.array([3, -3, -22, 22, 128, 128, 22, -22, -3, 3]) / 128.0
    for m in range(-2, 3):
        acc = sum(h[i] * ht[i + 2 * m] for i in range(12) if 0 <= i + 2 * m < 12)
        assert acc == pytest.approx(2.0 if m == 0 else 0.0, abs=1e-15)


def _interp_integral(grid, table, lo, hi, step):
    i0 = max(int(round((lo - grid[0]) / step)), 0)
    i1 = min(int(round((hi - grid[0]) / step)), table.size - 1)
    if i1 <= i0:
        return 0.0
    return float(np.trapezoid(table[i0:i1 + 1], dx=step))


def test_spline_biorthogonality():
    step = 2.0 ** -SPLINE.depth
    psi_bp = SPLINE.psi.breakpoints
    psi_c = SPLINE.psi.values
    for k in range(-3, 4):
        want = 1.0 if k == 0 else 0.0
        phi_ip = _interp_integral(SPLINE._phi_grid + k, SPLINE._phi_table, 0.0, 1.0, step)
        assert abs(phi_ip - want) < 1e-5
        psi_ip = sum(c * _interp_integral(SPLINE._psi_grid + k, SPLINE._psi_table,
                                          psi_bp[i], psi_bp[i + 1], step)
                     for i, c in enumerate(psi_c))
        assert abs(psi_ip - want) < 1e-5
    for k in range(-2, 3):
        cross1 = _interp_integral(SPLINE._psi_grid + k, SPLINE._psi_table, 0.0, 1.0, step)
        cross2 = sum(c * _interp_integral(SPLINE._phi_grid + k, SPLINE._phi_table,
                                          psi_bp[i], psi_bp[i + 1], step)
                     for i, c in enumerate(psi_c))
        assert abs(cross1) < 1e-5 and abs(cross2) < 1e-5


def test_synth_tables_partition_of_unity():
    x = np.linspace(0.0, 1.0, 257)
    acc = sum(SPLINE.synth_phi(x - k) for k in range(-6, 7))
    np.testing.assert_allclose(acc, 1.0, atol=1e-9)


def test_haar_parseval():
    rng = np.random.default_rng(2)
    for _ in range(20):
        c = random_coeffset(rng)
        energy = _synth_energy(HAAR, c)
        assert energy == pytest.approx(c.l2_sq(), rel=1e-6)


def test_empirical_matches_per_atom():
    rng = np.random.default_rng(5)
    pts = np.sort(rng.random(400) * 1.4 - 0.2)
    sample = PointSample(pts, 128)
    window = (-0.25, 1.25)
    for basis in (HAAR, SPLINE):
        bh, vh = empirical_maps(basis, sample, window, 4)
        for lam in active_indices(basis, window, 4):
            assert bh[lam] == pytest.approx(
                empirical_coeff(basis, lam, sample), abs=1e-14)
            assert vh[lam] == pytest.approx(
                empirical_variance(basis, lam, sample), abs=1e-14)


def test_empirical_maps_empty_sample():
    bh, vh = empirical_maps(HAAR, PointSample(np.empty(0), 8), (0.0, 1.0), 3)
    assert bh == {} and vh == {}


@pytest.mark.parametrize("name", ["Haar2", "Gauss1", "Bumps", "Beta4"])
def test_true_maps_match_per_atom(name):
    signal = SIGNALS[name]
    window = (-1.0, 2.5)
    for basis in (HAAR, SPLINE):
        beta, var = true_maps(basis, signal, window, 3, 64)
        for lam in active_indices(basis, window, 3):
            assert beta[lam] == pytest.approx(
                true_coeff(basis, lam, signal), abs=1e-13)
            assert var[lam] == pytest.approx(
                true_variance(basis, lam, signal, 64), abs=1e-13)


def test_unbiasedness_of_empirical_coeff():
    signal = SIGNALS["Haar2"]
    lam = LambdaIndex(2, 1)
    n = 200
    beta = true_coeff(HAAR, lam, signal)
    vals = [empirical_coeff(HAAR, lam, sample_points(signal, n, substream(21, r)))
            for r in range(3000)]
    se = np.std(vals, ddof=1) / math.sqrt(len(vals))
    assert abs(np.mean(vals) - beta) < 4 * se


def test_reconstruct_haar_exact():
    # Haar2 is constant on width-1/8 dyadic cells, so levels up to 2 resolve it
    signal = SIGNALS["Haar2"]
    coeffs = CoeffSet()
    for lam in active_indices(HAAR, (0.0, 1.0), 2):
        coeffs[lam] = true_coeff(HAAR, lam, signal)
    x = (np.arange(8) + 0.5) / 8.0
    np.testing.assert_allclose(reconstruct(HAAR, coeffs, x), signal.pdf(x),
                               atol=1e-12)


def test_reconstruct_spline_flat():
    # the spline pair reproduces constants: synthesising the true coefficient
    # map of the flat signal returns 1 in the interior of [0, 1]
    beta, _ = true_maps(SPLINE, SIGNALS["Haar1"], (-0.5, 1.5), 4, 64)
    x = np.linspace(0.35, 0.65, 41)
    vals = reconstruct(SPLINE, beta, x)
    np.testing.assert_allclose(vals, 1.0, atol=5e-3)


def test_frame_bounds_spline():
    lo, hi = SPLINE.frame_bounds(n_sets=60, seed=3)
    assert 0.0 < lo <= hi
    assert hi / lo < 10.0
    assert HAAR.frame_bounds() == (1.0, 1.0)
