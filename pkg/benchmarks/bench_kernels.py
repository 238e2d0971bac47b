#!/usr/bin/env python3
"""Numba vs numpy timings for the two hot kernels.

    python benchmarks/bench_kernels.py [--repeat 5] [--nodes 1000000]

Prints median wall time per call for each backend and the ratio. Set
CALABI_GLUE_THREADS to cap the numba thread pool.
"""
import argparse
import time

import numpy as np

from calabi_glue import _backend, kernels
from calabi_glue.calabi import CalabiParams, calabi_cartesian_chart, complex_structure
from calabi_glue.obstruction import builtin, gauge_tensor_H, sphere_nodes
from calabi_glue.tensor_core import jet


def median_time(fn, repeat, warmup=2):
    for _ in range(warmup):
        fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return float(np.median(times))


def riemann_case(n):
    chart = calabi_cartesian_chart(CalabiParams(n))
    p = np.full(2 * n, 1.3 / np.sqrt(2 * n))
    g, dg, ddg = jet(chart, p, 1e-3, 4)
    ginv = np.linalg.inv(g)
    return lambda: kernels.riemann_from_jet(ginv, dg, ddg)


def sphere_case(n, nodes):
    data = builtin("kahler-einstein", n, 2.0)
    h = gauge_tensor_H(data).coeffs
    jm = complex_structure(n)
    block = np.concatenate(list(sphere_nodes(2 * n, nodes, seed=0)))
    return lambda: kernels.sphere_pairing_sums(h, jm, n, block)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--nodes", type=int, default=1_000_000)
    args = ap.parse_args()
    _backend.apply_thread_override()
    if not _backend.numba_available():
        raise SystemExit("numba is not installed; nothing to compare")

    cases = []
    for n in (2, 3, 4):
        cases.append((f"riemann_from_jet m={2 * n}", riemann_case(n), 200 * args.repeat))
    for n in (2, 3):
        cases.append((f"sphere_pairing_sums m={2 * n} N={args.nodes:.0e}", sphere_case(n, args.nodes), args.repeat))

    print(f"{'kernel':<40} {'numpy [s]':>12} {'numba [s]':>12} {'numpy/numba':>12}")
    for name, fn, rep in cases:
        out = {}
        for backend in ("numpy", "numba"):
            _backend.set_backend(backend)
            out[backend] = median_time(fn, rep)
        _backend.set_backend("numba")
        print(f"{name:<40} {out['numpy']:>12.3e} {out['numba']:>12.3e} {out['numpy'] / out['numba']:>12.2f}")


if __name__ == "__main__":
    main()
