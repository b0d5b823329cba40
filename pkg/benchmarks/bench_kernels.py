#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-numpy fallback.

Covers the three hot non-BLAS stages of feature extraction plus the
percolation pair scan, and an end-to-end feature-extraction pass with
each backend selected.  The evolution matmul itself runs through BLAS in
both backends and is reported once for context.

Usage:
    python benchmarks/bench_kernels.py [--qubits 11] [--batch 2048] [--repeats 5]
"""

import argparse
import time

import numpy as np

from qreservoir._kernels import available_backends


def timeit(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--qubits", type=int, default=11)
    ap.add_argument("--batch", type=int, default=2048)
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    backends = available_backends()
    if "compiled" not in backends:
        print("note: compiled backend not built; timing the fallback only")

    n = args.qubits
    dim = 2**n
    rng = np.random.default_rng(0)
    thetas = rng.uniform(0, np.pi, (args.batch, n))
    phis = rng.uniform(0, np.pi, (args.batch, n))
    q, _ = np.linalg.qr(rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)))
    prop_t = np.ascontiguousarray(q.T)
    h = 0.02 * (q + q.conj().T)
    energies = np.real(np.diag(h))

    states = backends["numpy"].product_states(thetas, phis)
    evolved = states @ prop_t
    probs = np.abs(evolved) ** 2

    print(f"N={n} (dim {dim}), batch {args.batch}, best of {args.repeats}\n")
    header = f"{'kernel':<22}" + "".join(f"{name:>12}" for name in backends) + f"{'speedup':>10}"
    print(header)
    print("-" * len(header))

    cases = {
        "product_states": lambda impl: impl.product_states(thetas, phis),
        "probabilities": lambda impl: impl.probabilities(evolved),
        "standardize_rows": lambda impl: impl.standardize_rows(probs),
        "percolation_edges": lambda impl: impl.percolation_edges(energies, h, 1e-12),
    }
    for name, call in cases.items():
        times = {bk: timeit(lambda: call(impl), args.repeats) for bk, impl in backends.items()}
        speedup = times["numpy"] / times.get("compiled", times["numpy"])
        row = f"{name:<22}" + "".join(f"{times[bk] * 1e3:>10.1f}ms" for bk in backends)
        print(row + f"{speedup:>9.1f}x")

    blas = timeit(lambda: states @ prop_t, args.repeats)
    print(f"\nevolution matmul (BLAS, shared by both): {blas * 1e3:.1f}ms")

    def end_to_end(impl):
        s = impl.product_states(thetas, phis)
        p = impl.probabilities(s @ prop_t)
        return impl.standardize_rows(p)

    times = {bk: timeit(lambda: end_to_end(impl), args.repeats) for bk, impl in backends.items()}
    speedup = times["numpy"] / times.get("compiled", times["numpy"])
    row = f"{'feature pipeline':<22}" + "".join(f"{times[bk] * 1e3:>10.1f}ms" for bk in backends)
    print(row + f"{speedup:>9.1f}x")


if __name__ == "__main__":
    main()
