"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat 3]

Each row integrates the phase equation for a batch of momenta on one
potential, the inner loop of the window checks and eigenvalue scans.
"""
import argparse
import math
import time

import numpy as np

from spacingbound import PotentialSpec, build_potential, _fallback
from spacingbound.eigensolver import node_potential

try:
    from spacingbound import _kernels as compiled
except ImportError:  # extension not built
    compiled = None

CASES = [
    ("exponential", {"c": 4.0, "lam": 1.0}, 30.0),
    ("power", {"c": 1.0, "gamma": 0.5}, 100.0),
    ("wigner_von_neumann", {"c": 2.0, "omega": 2.0, "gamma": 1.0}, 100.0),
    ("step_sequence", {"c": 1.0, "eta": 0.5}, 100.0),
]


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_phase(impl, pot, X, ks):
    fam, c, p1, p2 = pot.kernel_family()
    segs = pot.segments(X)
    return lambda: impl.integrate_batch(ks, *segs, fam, c, p1, p2, 1e-10, 1e-12, math.pi)


def bench_sturm(impl, pot, X, n):
    h = X / n
    diag = np.ascontiguousarray(2.0 / h**2 + node_potential(pot, X, n))
    lo, hi = float(diag.min() - 4 / h**2), float(diag.max() + 4 / h**2)
    return lambda: impl.eigs_by_index(diag, 1.0 / h**4, 0, 50, lo, hi, 1e-14)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--momenta", type=int, default=16)
    args = ap.parse_args()
    if compiled is None:
        print("compiled kernels are not built; only the fallback can run")
        return
    ks = np.linspace(1.0, 10.0, args.momenta)
    print(f"{'kernel':<14}{'case':<22}{'compiled s':>12}{'python s':>12}{'speedup':>10}")
    for family, params, X in CASES:
        pot = build_potential(PotentialSpec(family, params))
        tc = best_of(bench_phase(compiled, pot, X, ks), args.repeat)
        tp = best_of(bench_phase(_fallback, pot, X, ks), args.repeat)
        print(f"{'phase batch':<14}{family:<22}{tc:>12.4f}{tp:>12.4f}{tp / tc:>9.1f}x")
    pot = build_potential(PotentialSpec(*CASES[2][:2]))
    tc = best_of(bench_sturm(compiled, pot, 40.0, 4000), args.repeat)
    tp = best_of(bench_sturm(_fallback, pot, 40.0, 4000), args.repeat)
    print(f"{'sturm bisect':<14}{'wigner_von_neumann':<22}{tc:>12.4f}{tp:>12.4f}{tp / tc:>9.1f}x")


if __name__ == "__main__":
    main()
