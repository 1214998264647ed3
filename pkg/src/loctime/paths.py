"""Sample path generation on a uniform time grid.

Paths are immutable once built.  Generation is a pure function of
``(seed, dt, n_steps, kind, sigma)``: the Gaussian increments come from
numpy's PCG64 generator via ``standard_normal`` (ziggurat), so the same
inputs reproduce the same values bit for bit.

Generators accept ``n_steps`` covering more than the analysis horizon so
that forward-shifted estimators (which read ``X_{s+eps}`` untruncated)
stay inside the grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

BROWNIAN = "brownian"
SIGMA_MARTINGALE = "sigma_martingale"

# dt and horizon are powers of two in practice; this tolerance only guards
# against configs written with rounded decimals.
_GRID_RTOL = 1e-9


def _is_multiple(value: float, step: float) -> bool:
    ratio = value / step
    return abs(ratio - round(ratio)) <= _GRID_RTOL * max(1.0, abs(ratio))


@dataclass(frozen=True)
class SigmaSpec:
    """Integrand catalogue for martingale paths ``X = int sigma dB``.

    ``formula`` is one of ``constant`` (sigma = c0) or ``affine_sine``
    (sigma(t) = c0 + c1*sin(frequency*t)).  ``declared_gamma`` is the
    Holder order claimed for the formula and must exceed 1/4;
    ``lower_bound_a`` is the claimed uniform lower bound on |sigma|,
    checked against the sampled grid at generation time.
    """

    formula: str
    c0: float
    c1: float = 0.0
    frequency: float = 0.0
    declared_gamma: float = 1.0
    lower_bound_a: float | None = None

    def __post_init__(self):
        if self.formula not in ("constant", "affine_sine"):
            raise ValueError(f"unknown sigma formula: {self.formula!r}")
        if not self.declared_gamma > 0.25:
            raise ValueError("declared_gamma must exceed 1/4")
        if self.lower_bound_a is None:
            bound = abs(self.c0) - abs(self.c1)
            object.__setattr__(self, "lower_bound_a", bound)
        if not self.lower_bound_a > 0:
            raise ValueError("lower_bound_a must be positive")

    def values_on(self, times: np.ndarray) -> np.ndarray:
        if self.formula == "constant":
            return np.full_like(times, self.c0, dtype=float)
        return self.c0 + self.c1 * np.sin(self.frequency * times)

    def validate_on(self, times: np.ndarray) -> None:
        sigma = self.values_on(times)
        if np.min(np.abs(sigma)) < self.lower_bound_a:
            raise ValueError(
                "sigma drops below its declared lower bound on this grid"
            )


@dataclass(frozen=True)
class Path:
    """A discretely sampled trajectory on the grid t_i = i*dt.

    ``values`` has length N+1 with values[i] = X(i*dt).  ``horizon`` is the
    analysis horizon T <= N*dt; indices beyond T/dt are forward margin.
    ``level_offset`` records the level already subtracted via
    :func:`shift_level`.
    """

    dt: float
    values: np.ndarray
    horizon: float
    seed: int
    kind: str
    level_offset: float = 0.0
    sigma: SigmaSpec | None = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if values.ndim != 1 or values.size < 2:
            raise ValueError("a path needs at least two samples")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not _is_multiple(self.horizon, self.dt):
            raise ValueError("horizon must be an exact multiple of dt")
        if self.horizon_index > self.n_steps:
            raise ValueError("horizon exceeds the sampled grid")

    @property
    def n_steps(self) -> int:
        return self.values.size - 1

    @property
    def horizon_index(self) -> int:
        return round(self.horizon / self.dt)

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.values.size) * self.dt


def generate_brownian(
    dt: float, n_steps: int, seed: int, horizon: float | None = None
) -> Path:
    """Standard Brownian motion: iid N(0, dt) increments from seed ``seed``."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    if n_steps < 1:
        raise ValueError("n_steps must be at least 1")
    if horizon is None:
        horizon = n_steps * dt
    rng = np.random.default_rng(seed)
    increments = rng.standard_normal(n_steps) * math.sqrt(dt)
    values = np.empty(n_steps + 1)
    values[0] = 0.0
    np.cumsum(increments, out=values[1:])
    return Path(dt=dt, values=values, horizon=horizon, seed=seed, kind=BROWNIAN)


def generate_sigma_martingale(driver: Path, sigma: SigmaSpec) -> Path:
    """Left-point Ito discretization of ``int sigma(s) dB_s`` over ``driver``."""
    if driver.kind != BROWNIAN:
        raise ValueError("driver must be a Brownian path")
    times = driver.times
    sigma.validate_on(times)
    increments = np.diff(driver.values) * sigma.values_on(times[:-1])
    values = np.empty_like(driver.values)
    values[0] = 0.0
    np.cumsum(increments, out=values[1:])
    return Path(
        dt=driver.dt,
        values=values,
        horizon=driver.horizon,
        seed=driver.seed,
        kind=SIGMA_MARTINGALE,
        sigma=sigma,
    )


def shift_level(path: Path, y: float) -> Path:
    """Subtract level ``y``, so level-y estimation becomes level-0."""
    if y == 0.0:
        return path
    return replace(
        path,
        values=path.values - y,
        level_offset=path.level_offset + y,
    )
