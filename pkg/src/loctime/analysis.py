"""Ensemble error statistics and convergence-rate fitting.

The error of interest is the L2(Omega) norm of the sup over [0, T] of the
pointwise estimation error, Monte Carlo estimated over seeds; the sup is
taken as the max over the reported time grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .estimators import Curve


@dataclass(frozen=True)
class EnsembleErrorReport:
    """Per-seed sup errors and their L2(Omega) summary for one (kind, eps)."""

    estimator_kind: object
    eps: float
    per_path_sup_error: np.ndarray
    l2_estimate: float
    std_error: float
    n_paths: int


@dataclass(frozen=True)
class RateReport:
    """Least-squares fit of log error against log eps."""

    eps_values: np.ndarray
    errors: np.ndarray
    slope: float
    intercept: float
    r_squared: float


def sup_error(estimate: Curve, reference: Curve) -> float:
    """Max over the shared grid of |estimate - reference|."""
    if estimate.t_values.shape != reference.t_values.shape or not np.array_equal(
        estimate.t_values, reference.t_values
    ):
        raise ValueError("curves are not on the same time grid")
    return float(np.max(np.abs(estimate.values - reference.values)))


def l2_ensemble_error(
    per_path_errors, estimator_kind=None, eps: float = 0.0
) -> EnsembleErrorReport:
    """L2(Omega) estimate sqrt(mean e^2) with a delta-method standard error."""
    errors = np.asarray(per_path_errors, dtype=float)
    if errors.size == 0:
        raise ValueError("per_path_errors must be nonempty")
    squared = errors * errors
    l2 = math.sqrt(float(np.mean(squared)))
    if errors.size > 1 and l2 > 0:
        std_error = float(np.std(squared, ddof=1)) / (2.0 * l2 * math.sqrt(errors.size))
    else:
        std_error = 0.0
    return EnsembleErrorReport(
        estimator_kind=estimator_kind,
        eps=eps,
        per_path_sup_error=errors,
        l2_estimate=l2,
        std_error=std_error,
        n_paths=errors.size,
    )


def fit_rate(eps_values, errors) -> RateReport:
    """OLS of log(error) on log(eps); the slope is the empirical rate."""
    eps_values = np.asarray(eps_values, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if eps_values.shape != errors.shape:
        raise ValueError("eps_values and errors must have the same length")
    if eps_values.size < 4:
        raise ValueError("rate fit needs at least 4 points")
    if np.any(np.diff(eps_values) >= 0):
        raise ValueError("eps_values must be strictly decreasing")
    if np.any(eps_values <= 0) or np.any(errors <= 0):
        raise ValueError("rate fit needs strictly positive eps and errors")
    x = np.log(eps_values)
    y = np.log(errors)
    slope, intercept = np.polyfit(x, y, 1)
    fitted = slope * x + intercept
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r_squared = 1.0 if ss_tot == 0.0 else max(0.0, 1.0 - ss_res / ss_tot)
    return RateReport(
        eps_values=eps_values,
        errors=errors,
        slope=float(slope),
        intercept=float(intercept),
        r_squared=r_squared,
    )


def as_subsequence_check(per_path_errors_by_eps, eps_values) -> float:
    """Fraction of paths whose sup errors are nonincreasing past the first eps.

    Intended for eps_n = 4^-n sequences (so sum sqrt(eps_n) converges); a
    finite-sample proxy for pathwise convergence along the subsequence.
    """
    matrix = np.asarray(per_path_errors_by_eps, dtype=float)
    eps_values = np.asarray(eps_values, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != eps_values.size:
        raise ValueError("matrix must be [n_eps x n_paths] matching eps_values")
    if eps_values.size < 3:
        raise ValueError("need at least 3 eps values")
    ratios = eps_values[1:] / eps_values[:-1]
    if np.any(np.abs(ratios - 0.25) > 1e-9):
        raise ValueError("eps_values must be consecutive powers 4^-n")
    tail = matrix[1:, :]
    nonincreasing = np.all(np.diff(tail, axis=0) <= 0.0, axis=0)
    return float(np.mean(nonincreasing))
