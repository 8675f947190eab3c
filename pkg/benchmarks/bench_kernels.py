"""Time the compiled kernels against the numpy fallback.

Usage: python benchmarks/bench_kernels.py [--repeat 5] [--n 400]
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from shifteval import _pykernels

try:
    from shifteval import _kernels
except ImportError:  # extension not built
    _kernels = None


def cases(n: int):
    rng = np.random.default_rng(0)
    y = np.cumsum(rng.normal(size=n))
    alphas = np.linspace(0, 1, 21)
    betas = np.linspace(0, 1, 21)
    phis = np.linspace(0.8, 0.98, 10)
    shocks = rng.normal(size=(5000, 100))
    return {
        "holt_filter": lambda k: k.holt_filter(y, 0.4, 0.2, 0.9, y[0], y[1] - y[0]),
        "holt_sse": lambda k: k.holt_sse(y, 0.4, 0.2, 0.9, y[0], y[1] - y[0]),
        "holt_grid_sse (21x21x10)": lambda k: k.holt_grid_sse(y, alphas, betas, phis, y[0], y[1] - y[0]),
        "simulate_paths (5000x100)": lambda k: k.simulate_paths(y[-1], 0.1, 0.4, 0.2, 0.9, shocks),
    }


def best_of(fn, repeat: int) -> float:
    timer = timeit.Timer(fn)
    number, _ = timer.autorange()
    return min(timer.repeat(repeat, number)) / number


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--n", type=int, default=400, help="series length")
    args = parser.parse_args(argv)

    print(f"{'kernel':<28}{'python':>12}{'cython':>12}{'speedup':>10}")
    for name, call in cases(args.n).items():
        slow = best_of(lambda: call(_pykernels), args.repeat)
        if _kernels is None:
            print(f"{name:<28}{slow * 1e3:>10.3f}ms{'n/a':>12}{'':>10}")
            continue
        fast = best_of(lambda: call(_kernels), args.repeat)
        print(f"{name:<28}{slow * 1e3:>10.3f}ms{fast * 1e3:>10.3f}ms{slow / fast:>9.1f}x")


if __name__ == "__main__":
    main()
