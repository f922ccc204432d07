"""Pure NumPy/Python versions of the hot kernels.

Mirrors ``_ckernels.pyx`` operation for operation. Integer hashing is exact,
so both backends produce identical uniforms; transcendental functions may
differ in the last ulp between libm and NumPy's SIMD loops.
"""

import math

import numpy as np

MASK = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
GAMMA2 = 0xD1B54A32D192ED03
C1 = 0xBF58476D1CE4E5B9
C2 = 0x94D049BB133111EB
TWO_PI = 2.0 * math.pi
INV_2_52 = 2.0 ** -52

KIND_LOG = 0
KIND_POWER = 1


def mix64(z: int) -> int:
    """SplitMix64 finalizer on a Python int."""
    z &= MASK
    z = ((z ^ (z >> 30)) * C1) & MASK
    z = ((z ^ (z >> 27)) * C2) & MASK
    return z ^ (z >> 31)


def stream_key(seed: int, stream: int) -> int:
    return mix64(mix64(seed + GAMMA) + stream * GAMMA2)


def _mix64_array(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(C1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(C2)
    return z ^ (z >> np.uint64(31))


def uniforms(key: int, counters: np.ndarray) -> np.ndarray:
    """Open-interval uniforms for ``counters`` of the stream ``key``."""
    c = np.asarray(counters, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(key) + (c + np.uint64(1)) * np.uint64(GAMMA)
        bits = _mix64_array(z)
    return ((bits >> np.uint64(12)).astype(np.float64) + 0.5) * INV_2_52


def draw_params(seed, start, stop, rho_mean, rho_sd, omega_min, omega_max,
                max_attempts=64):
    idx = np.arange(start, stop, dtype=np.uint64)
    u = uniforms(stream_key(seed, 0), idx)
    omega = omega_min + (omega_max - omega_min) * u
    rho = np.empty(idx.size)
    todo = np.arange(idx.size)
    for attempt in range(max_attempts):
        if todo.size == 0:
            break
        u1 = uniforms(stream_key(seed, 1 + 2 * attempt), idx[todo])
        u2 = uniforms(stream_key(seed, 2 + 2 * attempt), idx[todo])
        z = np.sqrt(-2.0 * np.log(u1)) * np.cos(TWO_PI * u2)
        r = rho_mean + rho_sd * z
        rho[todo] = r
        todo = todo[r >= 0]
    if todo.size:
        raise RuntimeError("rho rejection sampling exhausted its attempts")
    return rho, omega


def own_grid(rho, omega, grid):
    r = np.asarray(rho)[None, :]
    w = np.asarray(omega)[None, :]
    e = np.asarray(grid, dtype=float)[:, None]
    return -(1 / r) * w * e**2 + (1 / r - w) * e


def cross_grid(rho, omega, grid_a, epsilon_b):
    r = np.asarray(rho)[None, :]
    w = np.asarray(omega)[None, :]
    e = np.asarray(grid_a, dtype=float)[:, None]
    return -w * e * (1 + epsilon_b / r) + 0.0


def demand(kind, coef, expo, price, mu):
    """Quantity equating one term's marginal utility to ``mu * price``."""
    if kind == KIND_LOG:
        return coef / (mu * price)
    return math.pow(mu * price / (coef * expo), 1.0 / (expo - 1.0))


def spend(kinds, coef, expo, prices, mu):
    total = 0.0
    for k in range(len(kinds)):
        total += prices[k] * demand(kinds[k], coef[k], expo[k], prices[k], mu)
    return total


def solve_multiplier(kinds, coef, expo, prices, expenditure, rtol=1e-14):
    """Bisect on ``mu`` until the budget binds; spending falls as ``mu`` rises."""
    kinds = [int(k) for k in kinds]
    coef = [float(a) for a in coef]
    expo = [float(b) for b in expo]
    prices = [float(p) for p in prices]
    lo = hi = 1.0
    while spend(kinds, coef, expo, prices, hi) > expenditure:
        hi *= 2.0
    while spend(kinds, coef, expo, prices, lo) < expenditure:
        lo *= 0.5
    while hi - lo > rtol * lo:
        mid = math.sqrt(lo * hi)
        if mid <= lo or mid >= hi:
            break
        if spend(kinds, coef, expo, prices, mid) > expenditure:
            lo = mid
        else:
            hi = mid
    return math.sqrt(lo * hi)
