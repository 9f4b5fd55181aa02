"""Time the numba and numpy kernel backends on the reference system.

Usage: python benchmarks/bench_kernels.py [--repeat N] [--olfc-paths P]
"""

import argparse
import time

import numpy as np

from dynprice.dp import SolverConfig, solve_bellman
from dynprice.model import example_problem
from dynprice.policies import OLFCConfig, OLFCPolicy


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--olfc-paths", type=int, default=64)
    args = ap.parse_args()

    p = example_problem()
    cfg = SolverConfig()
    s = np.linspace(0.2, 1.0, args.olfc_paths)
    ids = np.arange(args.olfc_paths)
    results = {}
    for name in ("numba", "numpy"):
        pol = OLFCPolicy(p, OLFCConfig(), backend=name)
        solve_bellman(p, SolverConfig(K=11, M=11, n_exp=10), backend=name)  # warm-up / JIT
        pol.plan(2, s[:2], ids[:2])
        results[name] = (
            best_of(lambda: solve_bellman(p, cfg, backend=name), args.repeat),
            best_of(lambda: pol.plan(0, s, ids), args.repeat),
        )
    print(f"{'backend':8s} {'bellman K=201 M=201 nExp=1000':>30s} "
          f"{'OLFC t=0, ' + str(args.olfc_paths) + ' queries':>26s}")
    for name, (dp_t, olfc_t) in results.items():
        print(f"{name:8s} {dp_t:29.3f}s {olfc_t:25.3f}s")
    nb, npy = results["numba"], results["numpy"]
    print(f"speed-up {npy[0] / nb[0]:29.1f}x {npy[1] / nb[1]:25.1f}x")


if __name__ == "__main__":
    main()
