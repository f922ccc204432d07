# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; see ``_pykernels`` for the reference semantics."""

import numpy as np

from libc.math cimport sqrt, log, cos, pow
from libc.stdint cimport uint64_t

from ._pykernels import stream_key

cdef double TWO_PI = 6.283185307179586
cdef double INV_2_52 = 2.220446049250313e-16
cdef uint64_t GAMMA = 0x9E3779B97F4A7C15ULL


cdef inline uint64_t _mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline double _uniform(uint64_t key, uint64_t counter) noexcept nogil:
    cdef uint64_t bits = _mix64(key + (counter + 1) * GAMMA)
    return (<double>(bits >> 12) + 0.5) * INV_2_52


def uniforms(key, counters):
    cdef uint64_t k = key
    cdef uint64_t[::1] c = np.ascontiguousarray(counters, dtype=np.uint64)
    out = np.empty(c.shape[0])
    cdef double[::1] o = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(c.shape[0]):
            o[i] = _uniform(k, c[i])
    return out


def draw_params(seed, Py_ssize_t start, Py_ssize_t stop, double rho_mean,
                double rho_sd, double omega_min, double omega_max,
                int max_attempts=64):
    cdef Py_ssize_t n = stop - start
    rho_out = np.empty(n)
    omega_out = np.empty(n)
    cdef double[::1] rho = rho_out
    cdef double[::1] omega = omega_out
    keys_arr = np.array([stream_key(seed, s) for s in range(1 + 2 * max_attempts)],
                        dtype=np.uint64)
    cdef uint64_t[::1] keys = keys_arr
    cdef Py_ssize_t i
    cdef int a
    cdef uint64_t c
    cdef double u1, u2, r
    cdef bint failed = False
    with nogil:
        for i in range(n):
            c = <uint64_t>(start + i)
            omega[i] = omega_min + (omega_max - omega_min) * _uniform(keys[0], c)
            r = 0.0
            for a in range(max_attempts):
                u1 = _uniform(keys[1 + 2 * a], c)
                u2 = _uniform(keys[2 + 2 * a], c)
                r = rho_mean + rho_sd * (sqrt(-2.0 * log(u1)) * cos(TWO_PI * u2))
                if r < 0:
                    break
            if r >= 0:
                failed = True
            rho[i] = r
    if failed:
        raise RuntimeError("rho rejection sampling exhausted its attempts")
    return rho_out, omega_out


def own_grid(rho, omega, grid):
    cdef double[::1] r = np.ascontiguousarray(rho, dtype=float)
    cdef double[::1] w = np.ascontiguousarray(omega, dtype=float)
    cdef double[::1] g = np.ascontiguousarray(grid, dtype=float)
    out = np.empty((g.shape[0], r.shape[0]))
    cdef double[:, ::1] o = out
    cdef Py_ssize_t i, j
    cdef double e, inv
    with nogil:
        for j in range(r.shape[0]):
            inv = 1 / r[j]
            for i in range(g.shape[0]):
                e = g[i]
                o[i, j] = -inv * w[j] * (e * e) + (inv - w[j]) * e
    return out


def cross_grid(rho, omega, grid_a, double epsilon_b):
    cdef double[::1] r = np.ascontiguousarray(rho, dtype=float)
    cdef double[::1] w = np.ascontiguousarray(omega, dtype=float)
    cdef double[::1] g = np.ascontiguousarray(grid_a, dtype=float)
    out = np.empty((g.shape[0], r.shape[0]))
    cdef double[:, ::1] o = out
    cdef Py_ssize_t i, j
    cdef double f
    with nogil:
        for j in range(r.shape[0]):
            f = 1 + epsilon_b / r[j]
            for i in range(g.shape[0]):
                o[i, j] = -w[j] * g[i] * f + 0.0
    return out


cdef double _spend(long[::1] kinds, double[::1] coef, double[::1] expo,
                   double[::1] prices, double mu) noexcept nogil:
    cdef double total = 0.0
    cdef Py_ssize_t k
    for k in range(kinds.shape[0]):
        if kinds[k] == 0:
            total += prices[k] * (coef[k] / (mu * prices[k]))
        else:
            total += prices[k] * pow(mu * prices[k] / (coef[k] * expo[k]),
                                     1.0 / (expo[k] - 1.0))
    return total


def solve_multiplier(kinds, coef, expo, prices, double expenditure,
                     double rtol=1e-14):
    cdef long[::1] kd = np.ascontiguousarray(kinds, dtype=np.int_)
    cdef double[::1] a = np.ascontiguousarray(coef, dtype=float)
    cdef double[::1] b = np.ascontiguousarray(expo, dtype=float)
    cdef double[::1] p = np.ascontiguousarray(prices, dtype=float)
    cdef double lo = 1.0, hi = 1.0, mid
    with nogil:
        while _spend(kd, a, b, p, hi) > expenditure:
            hi *= 2.0
        while _spend(kd, a, b, p, lo) < expenditure:
            lo *= 0.5
        while hi - lo > rtol * lo:
            mid = sqrt(lo * hi)
            if mid <= lo or mid >= hi:
                break
            if _spend(kd, a, b, p, mid) > expenditure:
                lo = mid
            else:
                hi = mid
    return sqrt(lo * hi)
