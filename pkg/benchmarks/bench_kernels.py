"""Time the compiled kernels against the NumPy/Python fallback.

    python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import timeit

import numpy as np

from elasticast import _backend
from elasticast.montecarlo import ParamDistributions, SimulationConfig, parse_grid, simulate_own_band
from elasticast.oracle import random_point, random_utility, verify_theorem

DIST = ParamDistributions()


def cases():
    rng = np.random.default_rng(0)
    problems = [(random_utility(rng, n), random_point(rng, n))
                for n in rng.integers(2, 7, size=100)]
    rho = np.full(100_000, -1.26)
    omega = np.full(100_000, 0.05)
    grid = parse_grid("0:2:0.05")
    return {
        "draw_params 1e6": lambda k: k.draw_params(42, 0, 1_000_000, -1.26, 0.1, 1e-4, 0.1),
        "own_grid 41x1e5": lambda k: k.own_grid(rho, omega, grid),
        "solve_multiplier x100": lambda k: [
            k.solve_multiplier(*u._arrays(), np.array(p.prices), p.expenditure, 1e-14)
            for u, p in problems],
        "simulate_own_band 41x2e5": lambda k: simulate_own_band(
            grid, DIST, SimulationConfig(draws=200_000)),
        "verify_theorem x100": lambda k: [verify_theorem(u, p) for u, p in problems],
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    backends = _backend.available()
    print(f"{'case':28s}" + "".join(f"{b:>12s}" for b in backends) + f"{'speedup':>10s}")
    for name, fn in cases().items():
        times = {}
        for b in backends:
            _backend.use(b)
            k = _backend.get()
            times[b] = min(timeit.repeat(lambda: fn(k), number=1, repeat=args.repeat))
        row = f"{name:28s}" + "".join(f"{times[b] * 1e3:10.2f}ms" for b in backends)
        if "compiled" in times:
            row += f"{times['python'] / times['compiled']:9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
