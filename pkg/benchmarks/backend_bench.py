"""Timing comparison between the pure-Python and compiled kernels.

Run as `python3 benchmarks/backend_bench.py [--repeats N]`. Exercises the
three hot paths (mean-field integrator, Monte Carlo sweeps, random-graph
pair sampling) on identical inputs and reports best-of-N wall times.
"""

import argparse
import time

import numpy as np

from alvlab._kernels import load_backend
from alvlab.networks import build_square_lattice
from alvlab.phase import GameFamily, effective_payoff_matrix


def best_of(repeats, fn, *args):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def workloads():
    matrix = np.ascontiguousarray(
        effective_payoff_matrix(GameFamily(1.0).table, 0.5))
    rho0 = np.array([1 / 3, 1 / 3, 1 / 3])
    net = build_square_lattice(20)
    offsets, flat = net.csr()

    yield ("integrate_matrix (10k steps)",
           lambda impl: impl.integrate_matrix(rho0, matrix, 0.1, 10.0,
                                              1e-3, 1000, 0.0, 1e-6))
    yield ("run_sim (400 nodes, 200 sweeps)",
           lambda impl: impl.run_sim(offsets, flat, matrix, 0.1, 1 / 3,
                                     1 / 3, 200, 42, 0))
    threshold = int(4.0 / 1999 * 2.0 ** 64)
    yield ("er_pair_sample (2000 nodes)",
           lambda impl: impl.er_pair_sample(2000, threshold, 7))


def main():
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--repeats", type=int, default=3,
                        help="take the best of this many runs")
    args = parser.parse_args()

    pure = load_backend("pure")
    try:
        compiled = load_backend("compiled")
    except ImportError:
        compiled = None
        print("compiled backend unavailable; timing pure lane only\n")

    width = max(len(name) for name, _ in workloads())
    header = f"{'workload':<{width}}  {'pure':>10}  {'compiled':>10}  {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for name, call in workloads():
        t_pure = best_of(args.repeats, call, pure)
        if compiled is None:
            print(f"{name:<{width}}  {t_pure:>9.4f}s  {'-':>10}  {'-':>8}")
            continue
        t_comp = best_of(args.repeats, call, compiled)
        print(f"{name:<{width}}  {t_pure:>9.4f}s  {t_comp:>9.4f}s  "
              f"{t_pure / t_comp:>7.1f}x")


if __name__ == "__main__":
    main()
