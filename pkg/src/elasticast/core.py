"""
Closed-form price elasticities under additive preferences.

Given the income elasticity ``epsilon`` of a bundle, its average budget share
``omega`` and the elasticity of the marginal utility of income ``rho``, the
uncompensated own-price elasticity is the parabola

    eta = -(1/rho) * omega * epsilon**2 + (1/rho - omega) * epsilon

and the cross-price elasticity of bundle A with respect to the price of B is

    psi_AB = -(1/rho) * omega_B * epsilon_A * epsilon_B - omega_B * epsilon_A

For a complete partition of the budget both maps are the diagonal and
off-diagonal entries of one matrix (see :func:`full_matrix`).

Two entry points are kept apart on purpose: the standalone functions work on a
lone bundle, :class:`BundleSystem` validates a whole partition first.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

log = logging.getLogger(__name__)

#: Residuals below this pass silently.
SOFT_TOL = 1e-9
#: Residuals above this are rejected; in between they are logged.
HARD_TOL = 1e-6


class ElasticityError(ValueError):
    """Raised when an input violates the model's domain."""


def _finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ElasticityError(f"{name} must be finite, got {value!r}")
    return value


def check_rho(rho: float) -> float:
    rho = _finite("rho", rho)
    if rho >= 0:
        raise ElasticityError(f"rho must be strictly negative, got {rho!r}")
    return rho


def check_share(omega: float, name: str = "omega") -> float:
    omega = _finite(name, omega)
    if not 0 < omega <= 1:
        raise ElasticityError(f"{name} must lie in (0, 1], got {omega!r}")
    return omega


def check_epsilon(epsilon: float, name: str = "epsilon") -> float:
    return _finite(name, epsilon)


@dataclass(frozen=True)
class ElasticityInputs:
    """The three model inputs for one bundle.

    Validated on construction: ``rho < 0``, ``0 < omega <= 1`` and a finite
    ``epsilon`` (negative values, i.e. inferior goods, are admitted).
    """

    rho: float
    omega: float
    epsilon: float

    def __post_init__(self):
        object.__setattr__(self, "rho", check_rho(self.rho))
        object.__setattr__(self, "omega", check_share(self.omega))
        object.__setattr__(self, "epsilon", check_epsilon(self.epsilon))


def own_price_elasticity(inputs: ElasticityInputs) -> float:
    """Uncompensated own-price elasticity of one bundle."""
    rho, omega, eps = inputs.rho, inputs.omega, inputs.epsilon
    return -(1 / rho) * omega * eps**2 + (1 / rho - omega) * eps


def own_price(epsilon: float, omega: float, rho: float) -> float:
    """Shorthand for ``own_price_elasticity(ElasticityInputs(rho, omega, epsilon))``."""
    return own_price_elasticity(ElasticityInputs(rho, omega, epsilon))


def cross_price_elasticity(epsilon_a: float, epsilon_b: float,
                           omega_b: float, rho: float) -> float:
    """Uncompensated elasticity of demand for A with respect to the price of B.

    Evaluated in the factored form ``-omega_b * epsilon_a * (1 + epsilon_b/rho)``
    so that the result is exactly zero when ``epsilon_b == |rho|``.
    """
    epsilon_a = check_epsilon(epsilon_a, "epsilon_a")
    epsilon_b = check_epsilon(epsilon_b, "epsilon_b")
    omega_b = check_share(omega_b, "omega_b")
    rho = check_rho(rho)
    return -omega_b * epsilon_a * (1 + epsilon_b / rho) + 0.0


def marginal_share(omega: float, epsilon: float) -> float:
    """Marginal share ``theta = omega * epsilon``."""
    return _finite("omega", omega) * _finite("epsilon", epsilon)


def _check_sum(values: np.ndarray, what: str, target: float = 1.0) -> None:
    resid = abs(float(np.sum(values)) - target)
    if not math.isfinite(resid) or resid > HARD_TOL:
        raise ElasticityError(f"{what} must sum to {target}; residual {resid:.3e}")
    if resid > SOFT_TOL:
        log.info("%s sums to %r (residual %.3e, accepted as rounding noise)",
                 what, float(np.sum(values)), resid)


def _vector(name: str, values: Sequence[float]) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != 1:
        raise ElasticityError(f"{name} must be one-dimensional")
    if not np.all(np.isfinite(arr)):
        raise ElasticityError(f"{name} must be finite")
    return arr


def frisch_deflator(marginal_shares: Sequence[float],
                    dlog_prices: Sequence[float]) -> float:
    """Log-change of the Frisch price index: ``sum(theta_i * dlog p_i)``."""
    theta = _vector("marginal_shares", marginal_shares)
    dlogp = _vector("dlog_prices", dlog_prices)
    if theta.shape != dlogp.shape:
        raise ElasticityError(
            f"length mismatch: {theta.size} marginal shares, {dlogp.size} prices")
    _check_sum(theta, "marginal shares")
    return float(theta @ dlogp)


def divisia_indices(shares: Sequence[float], dlog_q: Sequence[float],
                    dlog_p: Sequence[float]) -> tuple[float, float]:
    """Divisia volume and price index log-changes ``(dlogQ, dlogP)``.

    Their sum is the log-change of total expenditure.
    """
    w = _vector("shares", shares)
    dq = _vector("dlog_q", dlog_q)
    dp = _vector("dlog_p", dlog_p)
    if not w.shape == dq.shape == dp.shape:
        raise ElasticityError(
            f"length mismatch: {w.size} shares, {dq.size} quantities, {dp.size} prices")
    _check_sum(w, "budget shares")
    return float(w @ dq), float(w @ dp)


@dataclass(frozen=True)
class BundleSystem:
    """A complete partition of the budget into preference-independent bundles.

    Shares must sum to one and satisfy Engel aggregation,
    ``sum(shares * epsilons) == 1``. Residuals up to :data:`SOFT_TOL` pass,
    up to :data:`HARD_TOL` are logged at INFO, anything larger raises.
    """

    shares: np.ndarray
    epsilons: np.ndarray
    rho: float
    labels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        shares = _vector("shares", self.shares)
        epsilons = _vector("epsilons", self.epsilons)
        n = shares.size
        if n < 2:
            raise ElasticityError("a bundle system needs at least two bundles")
        if epsilons.size != n:
            raise ElasticityError(
                f"length mismatch: {n} shares, {epsilons.size} income elasticities")
        for k, w in enumerate(shares):
            check_share(w, f"shares[{k}]")
        labels = tuple(self.labels) if self.labels else tuple(f"b{k}" for k in range(n))
        if len(labels) != n:
            raise ElasticityError(f"length mismatch: {n} shares, {len(labels)} labels")
        _check_sum(shares, "budget shares")
        _check_sum(shares * epsilons, "share-weighted income elasticities (Engel)")
        shares.flags.writeable = False
        epsilons.flags.writeable = False
        object.__setattr__(self, "shares", shares)
        object.__setattr__(self, "epsilons", epsilons)
        object.__setattr__(self, "rho", check_rho(self.rho))
        object.__setattr__(self, "labels", labels)

    @property
    def marginal_shares(self) -> np.ndarray:
        return self.shares * self.epsilons


@dataclass(frozen=True)
class ElasticityMatrix:
    """Matrix of uncompensated elasticities; entry (i, j) is the response of
    bundle i to the price of bundle j."""

    values: np.ndarray
    labels: tuple[str, ...]

    def row_residuals(self, epsilons) -> np.ndarray:
        """``sum_j psi_ij + epsilon_i`` (homogeneity), zero in exact arithmetic."""
        return self.values.sum(axis=1) + np.asarray(epsilons)

    def column_residuals(self, shares) -> np.ndarray:
        """``sum_i omega_i psi_ij + omega_j`` (Cournot aggregation)."""
        shares = np.asarray(shares)
        return shares @ self.values + shares


def full_matrix(system: BundleSystem) -> ElasticityMatrix:
    """Own- and cross-price elasticities for every pair of bundles.

    Off-diagonal entries use the cross-price map with ``i -> A, j -> B``; the
    diagonal adds the ``epsilon_i / rho`` own-substitution term and is computed
    with the own-price formula so both views agree to the last bit.
    """
    w, eps, rho = system.shares, system.epsilons, system.rho
    values = -w[None, :] * eps[:, None] * (1 + eps[None, :] / rho) + 0.0
    diag = -(1 / rho) * w * eps**2 + (1 / rho - w) * eps
    np.fill_diagonal(values, diag)
    values.flags.writeable = False
    return ElasticityMatrix(values=values, labels=system.labels)


def parabola_roots(omega: float, rho: float) -> tuple[float, float]:
    """Income elasticities at which the own-price elasticity vanishes."""
    omega = check_share(omega)
    rho = check_rho(rho)
    return 0.0, (1 - rho * omega) / omega
