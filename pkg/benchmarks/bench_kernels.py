"""Benchmark: compiled clustering kernels vs the numpy fallback.

Usage: python benchmarks/bench_kernels.py [--n 828] [--d 6] [--k 10]
Times the three KMeans kernels and the diagonal GMM E-step on synthetic
data at pipeline scale, then at 10x scale.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from climatext.cluster.kernels import available_backends


def bench(fn, *args, repeat: int = 7) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def run(n: int, d: int, k: int) -> None:
    rng = np.random.default_rng(0)
    X = rng.normal(size=(n, d))
    C = rng.normal(size=(k, d))
    labels = rng.integers(0, k, n)
    means = rng.normal(size=(k, d))
    variances = rng.uniform(0.5, 2.0, size=(k, d))
    logw = np.log(np.full(k, 1.0 / k))

    backends = available_backends()
    cases = [
        ("assign_labels", lambda b: b.assign_labels(X, C)),
        ("update_centroids", lambda b: b.update_centroids(X, labels, k)),
        ("min_sqdist", lambda b: b.min_sqdist(X, C)),
        ("gmm_estep_diag", lambda b: b.gmm_estep_diag(X, means, variances, logw)),
    ]
    print(f"\nn={n} d={d} k={k}")
    header = f"{'kernel':<18}" + "".join(f"{name:>12}" for name in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for name, call in cases:
        times = {bname: bench(call, mod) for bname, mod in backends.items()}
        row = f"{name:<18}" + "".join(f"{times[b] * 1e6:>10.0f}us"
                                      for b in backends)
        if "cython" in times and "numpy" in times:
            row += f"{times['numpy'] / times['cython']:>9.1f}x"
        print(row)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=828)
    parser.add_argument("--d", type=int, default=6)
    parser.add_argument("--k", type=int, default=10)
    args = parser.parse_args()

    backends = available_backends()
    print("available kernel backends:", ", ".join(backends))
    if "cython" not in backends:
        print("compiled kernels not built; timing the fallback only")
    run(args.n, args.d, args.k)
    run(args.n * 10, args.d, args.k)


if __name__ == "__main__":
    main()
