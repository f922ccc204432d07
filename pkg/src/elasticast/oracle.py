"""
Numerical check of the closed-form elasticities against explicit utility
maximization.

An additive utility ``u(q) = sum_i u_i(q_i)`` is maximized under the budget
``p . q = E`` by solving the first-order conditions ``u_i'(q_i) = mu * p_i``:
each term's marginal utility is inverted in closed form for a trial ``mu`` and
``mu`` is bisected until the budget binds. Elasticities are then measured by
central differences in log space and compared with :func:`core.full_matrix`
evaluated at the locally measured shares, income elasticities and ``rho``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _backend
from .core import BundleSystem, ElasticityError, full_matrix
from ._pykernels import KIND_LOG, KIND_POWER, demand


@dataclass(frozen=True)
class UtilityTerm:
    """One bundle's utility: ``a*log(q)`` or ``a*q**b`` with ``0 < b < 1``."""

    kind: str
    coef: float
    exponent: float = 0.0

    def __post_init__(self):
        if self.kind not in ("log", "power"):
            raise ElasticityError(f"unknown utility term kind {self.kind!r}")
        if not (math.isfinite(self.coef) and self.coef > 0):
            raise ElasticityError(f"term coefficient must be > 0, got {self.coef!r}")
        if self.kind == "power" and not 0 < self.exponent < 1:
            raise ElasticityError(f"power exponent must lie in (0, 1), got {self.exponent!r}")

    def value(self, q: float) -> float:
        if self.kind == "log":
            return self.coef * math.log(q)
        return self.coef * q**self.exponent

    def marginal(self, q: float) -> float:
        if self.kind == "log":
            return self.coef / q
        return self.coef * self.exponent * q ** (self.exponent - 1)


@dataclass(frozen=True)
class AdditiveUtility:
    terms: tuple[UtilityTerm, ...]

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if len(self.terms) < 2:
            raise ElasticityError("an additive utility needs at least two terms")

    @classmethod
    def log(cls, coefs: Sequence[float]) -> AdditiveUtility:
        return cls(tuple(UtilityTerm("log", a) for a in coefs))

    @classmethod
    def power(cls, coefs: Sequence[float], exponents: Sequence[float]) -> AdditiveUtility:
        if len(coefs) != len(exponents):
            raise ElasticityError("coefficients and exponents differ in length")
        return cls(tuple(UtilityTerm("power", a, b) for a, b in zip(coefs, exponents)))

    def __len__(self):
        return len(self.terms)

    def __call__(self, q: Sequence[float]) -> float:
        return sum(t.value(x) for t, x in zip(self.terms, q))

    def _arrays(self):
        kinds = np.array([KIND_LOG if t.kind == "log" else KIND_POWER for t in self.terms])
        return (kinds, np.array([t.coef for t in self.terms]),
                np.array([t.exponent for t in self.terms]))


@dataclass(frozen=True)
class MarketPoint:
    prices: tuple[float, ...]
    expenditure: float

    def __post_init__(self):
        prices = tuple(float(p) for p in self.prices)
        if not all(math.isfinite(p) and p > 0 for p in prices):
            raise ElasticityError(f"prices must be positive, got {prices}")
        if not (math.isfinite(self.expenditure) and self.expenditure > 0):
            raise ElasticityError(f"expenditure must be positive, got {self.expenditure!r}")
        object.__setattr__(self, "prices", prices)
        object.__setattr__(self, "expenditure", float(self.expenditure))

    def with_price(self, j: int, factor: float) -> MarketPoint:
        prices = list(self.prices)
        prices[j] *= factor
        return MarketPoint(tuple(prices), self.expenditure)

    def with_expenditure(self, factor: float) -> MarketPoint:
        return MarketPoint(self.prices, self.expenditure * factor)


@dataclass(frozen=True)
class OracleReport:
    quantities: np.ndarray
    multiplier: float
    shares: np.ndarray
    numeric_epsilon: np.ndarray
    numeric_theta: np.ndarray
    numeric_rho: float
    numeric_matrix: np.ndarray
    predicted_matrix: np.ndarray
    max_abs_error: float

    def to_dict(self) -> dict:
        return {
            "quantities": self.quantities.tolist(),
            "multiplier": self.multiplier,
            "shares": self.shares.tolist(),
            "numeric_epsilon": self.numeric_epsilon.tolist(),
            "numeric_theta": self.numeric_theta.tolist(),
            "numeric_rho": self.numeric_rho,
            "numeric_matrix": self.numeric_matrix.tolist(),
            "predicted_matrix": self.predicted_matrix.tolist(),
            "max_abs_error": self.max_abs_error,
        }


def solve_demand(utility: AdditiveUtility, point: MarketPoint,
                 rtol: float = 1e-14) -> tuple[np.ndarray, float]:
    """Utility-maximizing quantities and the marginal utility of income."""
    if len(point.prices) != len(utility):
        raise ElasticityError(
            f"{len(utility)} utility terms but {len(point.prices)} prices")
    kinds, coef, expo = utility._arrays()
    mu = _backend.get().solve_multiplier(kinds, coef, expo, np.array(point.prices),
                                         point.expenditure, rtol)
    q = np.array([demand(int(k), a, b, p, mu)
                  for k, a, b, p in zip(kinds, coef, expo, point.prices)])
    spent = float(np.dot(point.prices, q))
    if not (mu > 0 and abs(spent - point.expenditure) <= 1e-12 * point.expenditure):
        raise RuntimeError(
            f"demand solver missed the budget: spent {spent!r} of {point.expenditure!r}")
    return q, mu


def numeric_elasticities(utility: AdditiveUtility, point: MarketPoint,
                         step: float = 1e-5) -> OracleReport:
    """Measure elasticities by central log-differences and compare with theory.

    ``step`` is the half-width of the log perturbation applied to expenditure
    (prices fixed) and to one price at a time (expenditure fixed).
    """
    if not 0 < step <= 1e-3:
        raise ElasticityError(f"step must lie in (0, 1e-3], got {step!r}")
    n = len(utility)
    up, down = math.exp(step), math.exp(-step)
    q0, mu0 = solve_demand(utility, point)
    shares = np.asarray(point.prices) * q0 / point.expenditure

    e_hi, e_lo = point.with_expenditure(up), point.with_expenditure(down)
    q_hi, mu_hi = solve_demand(utility, e_hi)
    q_lo, mu_lo = solve_demand(utility, e_lo)
    epsilon = (np.log(q_hi) - np.log(q_lo)) / (2 * step)
    rho = (math.log(mu_hi) - math.log(mu_lo)) / (2 * step)
    prices = np.asarray(point.prices)
    theta = prices * (q_hi - q_lo) / (e_hi.expenditure - e_lo.expenditure)

    matrix = np.empty((n, n))
    for j in range(n):
        qp, _ = solve_demand(utility, point.with_price(j, up))
        qm, _ = solve_demand(utility, point.with_price(j, down))
        matrix[:, j] = (np.log(qp) - np.log(qm)) / (2 * step)

    predicted = full_matrix(BundleSystem(shares, epsilon, rho)).values
    return OracleReport(
        quantities=q0, multiplier=mu0, shares=shares, numeric_epsilon=epsilon,
        numeric_theta=theta, numeric_rho=rho, numeric_matrix=matrix,
        predicted_matrix=np.array(predicted),
        max_abs_error=float(np.max(np.abs(matrix - predicted))))


def check_report(report: OracleReport, tolerance: float) -> bool:
    """Matrix agreement plus ``epsilon == theta / omega`` within ``tolerance``."""
    if not tolerance > 0:
        raise ElasticityError(f"tolerance must be > 0, got {tolerance!r}")
    matrix_err = float(np.max(np.abs(report.numeric_matrix - report.predicted_matrix)))
    share_err = float(np.max(np.abs(report.numeric_epsilon
                                    - report.numeric_theta / report.shares)))
    return matrix_err <= tolerance and share_err <= tolerance


def verify_theorem(utility: AdditiveUtility, point: MarketPoint,
                   tolerance: float = 1e-3, step: float = 1e-5) -> tuple[bool, OracleReport]:
    report = numeric_elasticities(utility, point, step)
    return check_report(report, tolerance), report


def random_utility(rng: np.random.Generator, n: int, family: str = "mixed") -> AdditiveUtility:
    """Draw an admissible additive utility; ``family`` is log, power or mixed."""
    terms = []
    for _ in range(n):
        kind = family if family != "mixed" else ("log", "power")[rng.integers(2)]
        a = float(rng.uniform(0.5, 2.0))
        b = float(rng.uniform(0.1, 0.9)) if kind == "power" else 0.0
        terms.append(UtilityTerm(kind, a, b))
    return AdditiveUtility(tuple(terms))


def random_point(rng: np.random.Generator, n: int) -> MarketPoint:
    return MarketPoint(tuple(rng.uniform(0.5, 2.0, n)), float(rng.uniform(10, 1000)))
