"""Wavelet-threshold intensity estimation for inhomogeneous Poisson processes."""

from .estimator import (ThresholdParams, default_j0, estimate,
                        estimation_window, gamma_breakpoint, threshold,
                        threshold_coeffs, v_tilde)
from .pointprocess import PointSample, integrate_against, merge_samples, poisson_count
from .risk import (RiskReport, StepCurve, UniformGrid, average_curves,
                   class_membership, coeff_risk, f_lambda, gamma_min,
                   l2_grid_risk, oracle_risk, risk_curve)
from .signals import SIGNALS, SignalSpec, gauss_mixture, get_signal, sample_points
from .wavelets import (BasisSpec, CoeffSet, LambdaIndex, active_indices,
                       analysis_atom, empirical_coeff, empirical_variance,
                       get_basis, reconstruct, true_coeff, true_variance)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
