"""Independent discrete local-time references.

The discretized Tanaka identity L_t = 2(X_t^+ - X_0^+ - sum 1_{X>0} dX) is
the canonical oracle; the strip-upcrossing count and the occupation-time
estimate are cross-checks with their own normalizations.  None of these
share code with the eps-indexed estimators they are used to judge.
"""

from __future__ import annotations

import enum

import numpy as np

from .estimators import Curve, FunctionSpec, _grid_indices, _prefix
from .paths import SIGMA_MARTINGALE, Path


class OracleKind(enum.Enum):
    TANAKA = "tanaka"
    UPCROSSING = "upcrossing"
    OCCUPATION = "occupation"


def _oracle_curve(t_grid, values, label: str) -> Curve:
    return Curve(np.asarray(t_grid, float), values.astype(float), 0.0, label)


def ito_indicator_integral(path: Path, t_grid) -> Curve:
    """Discrete Ito sum: sum_{i < k} 1_{X_i > 0} (X_{i+1} - X_i)."""
    k = _grid_indices(path, t_grid)
    k_max = int(k.max(initial=0))
    x = path.values
    terms = (x[:k_max] > 0.0) * (x[1 : k_max + 1] - x[:k_max])
    return _oracle_curve(t_grid, _prefix(terms)[k], 'ito_indicator')


def tanaka_local_time(path: Path, t_grid) -> Curve:
    """L_t = 2 (X_t^+ - X_0^+ - sum_{i<k} 1_{X_i>0} (X_{i+1} - X_i))."""
    k = _grid_indices(path, t_grid)
    ito = ito_indicator_integral(path, t_grid)
    xp = np.maximum(path.values[k], 0.0)
    xp0 = max(path.values[0], 0.0)
    return _oracle_curve(t_grid, 2.0 * (xp - xp0 - ito.values), 'tanaka')


def upcrossing_local_time(path: Path, h: float, t_grid) -> Curve:
    """2h times the number of completed upcrossings of the strip [0, h].

    An upcrossing completes when the path, having visited (-inf, 0], next
    reaches (h, inf).  Samples inside the strip leave the state unchanged.
    """
    if not h > 0:
        raise ValueError("strip width h must be positive")
    k = _grid_indices(path, t_grid)
    k_max = int(k.max(initial=0))
    x = path.values[: k_max + 1]
    decisive = np.flatnonzero((x <= 0.0) | (x > h))
    counts = np.zeros(k_max + 1)
    if decisive.size >= 2:
        above = x[decisive] > h
        completed = decisive[1:][above[1:] & ~above[:-1]]
        np.add.at(counts, completed, 1.0)
        counts = np.cumsum(counts)
    return _oracle_curve(t_grid, 2.0 * h * counts[k], 'upcrossing')


def occupation_local_time(path: Path, h: float, t_grid) -> Curve:
    """(1/2h) * Lebesgue time spent with |X| <= h, left-endpoint rule."""
    if not h > 0:
        raise ValueError("strip width h must be positive")
    k = _grid_indices(path, t_grid)
    k_max = int(k.max(initial=0))
    inside = np.abs(path.values[:k_max]) <= h
    values = _prefix(inside.astype(float))[k] * (path.dt / (2.0 * h))
    return _oracle_curve(t_grid, values, 'occupation')


def occupation_functional(path: Path, f: FunctionSpec, t_grid) -> Curve:
    """sum_{i<k} f(X_i) d[X,X] weights: dt for Brownian, sigma(t_i)^2 dt else."""
    k = _grid_indices(path, t_grid)
    k_max = int(k.max(initial=0))
    terms = f(path.values[:k_max] + path.level_offset)
    if path.kind == SIGMA_MARTINGALE:
        if path.sigma is None:
            raise ValueError("sigma-martingale path lacks its SigmaSpec")
        sigma = path.sigma.values_on(path.times[:k_max])
        terms = terms * sigma * sigma
    values = _prefix(terms)[k] * path.dt
    return _oracle_curve(t_grid, values, 'occupation_functional')
