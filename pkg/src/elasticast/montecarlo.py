"""
Monte-Carlo credible bands for the elasticity maps.

Parameter uncertainty is propagated forward: ``rho ~ Normal(mean, sd)``
(non-negative draws are rejected and redrawn) and ``omega ~ Uniform(min, max)``.
Each draw is a pure function of ``(seed, draw_index)`` via a counter-based
SplitMix64 stream, so results do not depend on chunking or worker count.
One ``(rho, omega)`` pair per draw is shared across the whole grid.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _backend
from .core import ElasticityError, check_epsilon, check_rho, check_share, own_price

DEFAULT_RHO_MEAN = -1.26
DEFAULT_RHO_SD = 0.1
DEFAULT_OMEGA_MIN = 0.0001
DEFAULT_OMEGA_MAX = 0.1
DEFAULT_DRAWS = 100_000
DEFAULT_SEED = 42


@dataclass(frozen=True)
class ParamDistributions:
    rho_mean: float = DEFAULT_RHO_MEAN
    rho_sd: float = DEFAULT_RHO_SD
    omega_min: float = DEFAULT_OMEGA_MIN
    omega_max: float = DEFAULT_OMEGA_MAX

    def __post_init__(self):
        check_rho(self.rho_mean)
        if not (math.isfinite(self.rho_sd) and self.rho_sd >= 0):
            raise ElasticityError(f"rho_sd must be finite and >= 0, got {self.rho_sd!r}")
        check_share(self.omega_min, "omega_min")
        check_share(self.omega_max, "omega_max")
        if self.omega_min > self.omega_max:
            raise ElasticityError(
                f"omega_min ({self.omega_min}) exceeds omega_max ({self.omega_max})")

    def pinned(self, omega: float) -> ParamDistributions:
        """Same rho law, omega fixed at ``omega``."""
        return ParamDistributions(self.rho_mean, self.rho_sd, omega, omega)


@dataclass(frozen=True)
class SimulationConfig:
    draws: int = DEFAULT_DRAWS
    seed: int = DEFAULT_SEED
    lower_pct: float = 2.5
    upper_pct: float = 97.5
    workers: int = 1

    def __post_init__(self):
        if int(self.draws) != self.draws or self.draws < 2:
            raise ElasticityError(f"draws must be an integer >= 2, got {self.draws!r}")
        if not 0 <= self.seed < 2**64:
            raise ElasticityError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        if not 0 < self.lower_pct < 50 < self.upper_pct < 100:
            raise ElasticityError(
                "percentiles must satisfy 0 < lower < 50 < upper < 100, "
                f"got ({self.lower_pct}, {self.upper_pct})")
        if self.workers < 1:
            raise ElasticityError(f"workers must be >= 1, got {self.workers!r}")


@dataclass(frozen=True)
class CredibleBand:
    grid: np.ndarray
    lower: np.ndarray
    median: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        n = len(self.grid)
        if not len(self.lower) == len(self.median) == len(self.upper) == n:
            raise ElasticityError("band vectors must match the grid length")

    def __len__(self):
        return len(self.grid)


def _draws(dist: ParamDistributions, config: SimulationConfig,
           start: int = 0, stop: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    stop = config.draws if stop is None else stop
    k = _backend.get()
    if config.workers == 1 or stop - start < 2 * config.workers:
        return k.draw_params(config.seed, start, stop, dist.rho_mean, dist.rho_sd,
                             dist.omega_min, dist.omega_max)
    edges = np.linspace(start, stop, config.workers + 1).astype(int)
    with ThreadPoolExecutor(config.workers) as pool:
        parts = list(pool.map(
            lambda se: k.draw_params(config.seed, int(se[0]), int(se[1]), dist.rho_mean,
                                     dist.rho_sd, dist.omega_min, dist.omega_max),
            zip(edges[:-1], edges[1:])))
    return (np.concatenate([p[0] for p in parts]),
            np.concatenate([p[1] for p in parts]))


def sample_params(dist: ParamDistributions, config: SimulationConfig,
                  draw_index: int) -> tuple[float, float]:
    """The ``(rho, omega)`` pair of one draw."""
    if not 0 <= draw_index < config.draws:
        raise ElasticityError(f"draw_index {draw_index} outside [0, {config.draws})")
    rho, omega = _draws(dist, config, draw_index, draw_index + 1)
    return float(rho[0]), float(omega[0])


def sample_all(dist: ParamDistributions, config: SimulationConfig):
    """All draws as two arrays ``(rho, omega)`` ordered by draw index."""
    return _draws(dist, config)


def _check_grid(grid) -> np.ndarray:
    g = np.asarray(grid, dtype=float).ravel()
    for k, e in enumerate(g):
        check_epsilon(e, f"grid[{k}]")
    return g


def _band(grid: np.ndarray, values: np.ndarray, config: SimulationConfig) -> CredibleBand:
    q = np.quantile(values, [config.lower_pct / 100, 0.5, config.upper_pct / 100],
                    axis=1, method="linear")
    # -0.0 from the sign of a zero product would leak into outputs
    q = q + 0.0
    return CredibleBand(grid=grid, lower=q[0], median=q[1], upper=q[2])


def _chunked_eval(fn, grid, rho, omega, config: SimulationConfig) -> np.ndarray:
    if config.workers == 1:
        return fn(rho, omega, grid)
    edges = np.linspace(0, rho.size, config.workers + 1).astype(int)
    with ThreadPoolExecutor(config.workers) as pool:
        parts = list(pool.map(lambda se: fn(rho[se[0]:se[1]], omega[se[0]:se[1]], grid),
                              zip(edges[:-1], edges[1:])))
    return np.concatenate(parts, axis=1)


def simulate_own_band(grid: Sequence[float], dist: ParamDistributions | None = None,
                      config: SimulationConfig | None = None) -> CredibleBand:
    """Percentile band of the own-price elasticity at each income elasticity in ``grid``."""
    dist = dist or ParamDistributions()
    config = config or SimulationConfig()
    g = _check_grid(grid)
    rho, omega = _draws(dist, config)
    values = _chunked_eval(_backend.get().own_grid, g, rho, omega, config)
    return _band(g, values, config)


def simulate_cross_band(grid_a: Sequence[float], epsilon_b: float,
                        dist: ParamDistributions | None = None,
                        config: SimulationConfig | None = None) -> CredibleBand:
    """Percentile band of the cross-price elasticity of A with respect to B.

    The sampled omega is the budget share of B; ``grid_a`` spans the income
    elasticity of A.
    """
    dist = dist or ParamDistributions()
    config = config or SimulationConfig()
    g = _check_grid(grid_a)
    eps_b = check_epsilon(epsilon_b, "epsilon_b")
    rho, omega = _draws(dist, config)
    kernel = _backend.get().cross_grid
    values = _chunked_eval(lambda r, w, ga: kernel(r, w, ga, eps_b), g, rho, omega, config)
    return _band(g, values, config)


def sensitivity_sweep(epsilon: float, rho: float,
                      omega_values: Sequence[float]) -> tuple[np.ndarray, float]:
    """Own-price elasticity across budget shares and its max relative change.

    The relative change is ``(max|eta| - min|eta|) / min|eta|``; it is defined
    as 0 when every eta is zero (``epsilon == 0``).
    """
    omegas = list(omega_values)
    if not omegas:
        raise ElasticityError("omega_values must be nonempty")
    etas = np.array([own_price(epsilon, w, rho) for w in omegas])
    mags = np.abs(etas)
    lo = mags.min()
    if lo == 0:
        if mags.max() == 0:
            return etas, 0.0
        return etas, math.inf
    return etas, float((mags.max() - lo) / lo)


def band_width_profile(band: CredibleBand) -> np.ndarray:
    return np.asarray(band.upper) - np.asarray(band.lower)


def parse_grid(spec: str) -> np.ndarray:
    """Parse ``start:stop:step``; ``stop`` is included if within half a step."""
    try:
        start, stop, step = (float(x) for x in spec.split(":"))
    except ValueError:
        raise ElasticityError(f"grid must look like start:stop:step, got {spec!r}") from None
    if not all(map(math.isfinite, (start, stop, step))) or step <= 0 or stop < start:
        raise ElasticityError(f"grid needs finite start <= stop and step > 0, got {spec!r}")
    n = int(math.floor((stop - start) / step + 0.5)) + 1
    return start + step * np.arange(n)
