"""Benchmark: compiled convolution kernel versus the pure-Python fallback.

Times the raw kernel on dense and sparse group-ring products, then a couple
of end-to-end workloads (difference-set verification and a ternary-array
signature search), with both backends in one process.

Usage: python benchmarks/bench_kernels.py [--repeat N]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from hforge import kernels
from hforge.groups import AbelianGroup, modular
from hforge.ring import RingElement
from hforge.sigsets import pta_search_for_signature


def time_call(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_convolve(impl, group, a, b, repeat):
    return time_call(lambda: kernels.convolve(a, b, group.mul, impl=impl), repeat)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=25)
    args = parser.parse_args()

    impls = {}
    impls["py"] = kernels.get_impl("py")
    try:
        impls["c"] = kernels.get_impl("c")
    except ImportError:
        print("compiled extension not available; benchmarking the fallback only")

    rng = np.random.default_rng(1)
    cases = []
    for orders in ([8, 8], [16, 16]):
        ab = AbelianGroup(orders)
        g = ab.to_group()
        dense_a = rng.choice([-1, 1], size=g.order).astype(np.int64)
        dense_b = rng.choice([-1, 1], size=g.order).astype(np.int64)
        sparse = np.zeros(g.order, dtype=np.int64)
        sparse[rng.choice(g.order, size=g.order // 16, replace=False)] = 1
        cases.append((f"dense +-1, order {g.order}", g, dense_a, dense_b))
        cases.append((f"sparse x dense, order {g.order}", g, sparse, dense_b))

    print(f"{'case':32s}" + "".join(f"{name:>14s}" for name in impls))
    for label, g, a, b in cases:
        times = [bench_convolve(impl, g, a, b, args.repeat) for impl in impls.values()]
        row = f"{label:32s}" + "".join(f"{t * 1e6:11.1f} us" for t in times)
        if len(times) == 2 and times[-1] > 0:
            row += f"   (x{times[0] / times[-1]:.1f})"
        print(row)

    # end-to-end: verification of a dense product, and a small signature search
    m64 = modular(64)
    d = RingElement(m64, rng.choice([-1, 1], size=64).astype(np.int64))

    def verify_once(impl):
        kernels.convolve(d.coeffs, d.coeffs[m64.inv], m64.mul, impl=impl)

    print()
    for name, impl in impls.items():
        t = time_call(lambda: verify_once(impl), args.repeat)
        print(f"verification product, order 64   [{name}] {t * 1e6:10.1f} us")

    k_parent = AbelianGroup([4, 4, 2]).to_group()
    g_inv = AbelianGroup([4, 4, 2]).index_of((0, 0, 1))

    def search_once(impl):
        saved = kernels._impl
        kernels._impl = impl
        try:
            pta_search_for_signature(k_parent, g_inv)
        finally:
            kernels._impl = saved

    for name, impl in impls.items():
        t = time_call(lambda: search_once(impl), max(3, args.repeat // 5))
        print(f"signature search, order 32       [{name}] {t * 1e3:10.2f} ms")


if __name__ == "__main__":
    main()
