"""Compare the compiled and pure-Python propagation kernels.

Usage: python benchmarks/bench_kernels.py [--n 2000] [--repeat 3]
"""
import argparse
import time

import numpy as np

from rtnsim import _backend
from rtnsim.montecarlo import EnsembleConfig, run_ensemble
from rtnsim.noise import RtnParams
from rtnsim.protocol import shulman_protocol
from rtnsim.qdyn import j0_from_mhz


def bench(backend, n, repeat):
    proto = shulman_protocol(25.0, 1.0)
    noise = RtnParams(j0_from_mhz(11.6), 9.0)
    cfg = EnsembleConfig(1, n, 100, backend=backend)
    best, res = float("inf"), None
    for _ in range(repeat):
        start = time.perf_counter()
        res = run_ensemble(proto, noise, cfg)
        best = min(best, time.perf_counter() - start)
    return best, res


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=2000, help="trajectories per run")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    results = {}
    for name in _backend.available():
        best, res = bench(name, args.n, args.repeat)
        results[name] = res
        print(f"{name:>8}: {best:7.3f} s for {args.n} trajectories "
              f"({1e3 * best / args.n:.3f} ms/trajectory)")
    if len(results) == 2:
        a, b = results.values()
        print(f"max |rho difference| between backends: {np.max(np.abs(a.rho_avg - b.rho_avg)):.1e}")


if __name__ == "__main__":
    main()
