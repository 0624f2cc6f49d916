#!/usr/bin/env python3
"""Benchmark the compiled kernels against the numpy fallback.

The two backends must agree bit for bit, so this doubles as a consistency
check: each timing pair asserts identical outputs before reporting.

Usage: python3 benchmarks/kernel_bench.py [--size 512] [--repeats 5]
"""

import argparse
import time

import numpy as np

from seamforge._kernels import _fallback

try:
    from seamforge._kernels import _native
except ImportError:
    _native = None


def timeit(fn, repeats):
    best = float("inf")
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def bench(name, native_fn, fallback_fn, repeats, check):
    t_fb, r_fb = timeit(fallback_fn, repeats)
    if _native is None:
        print(f"{name:<28} numpy {t_fb * 1e3:8.2f} ms   (no compiled backend)")
        return
    t_nat, r_nat = timeit(native_fn, repeats)
    check(r_nat, r_fb)
    print(
        f"{name:<28} native {t_nat * 1e3:8.2f} ms   numpy {t_fb * 1e3:8.2f} ms"
        f"   speedup {t_fb / t_nat:6.1f}x"
    )


def check_dp(a, b):
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1]), "DP backends disagree"


def check_match(a, b):
    assert a[0] == b[0] and a[1] == b[1] and np.array_equal(a[2], b[2]), "matcher backends disagree"


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--size", type=int, default=512)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()
    n = args.size
    rng = np.random.default_rng(0)

    energy = rng.random((n, n))
    cl, cu, cr = rng.random((3, n, n))
    pred = np.ascontiguousarray((rng.random((n, n)) < 0.1).astype(np.uint8))
    gt = np.ascontiguousarray((rng.random((n, n)) < 0.1).astype(np.uint8))

    print(f"grid {n}x{n}, best of {args.repeats}")
    bench(
        "cumulative matrix (plain)",
        lambda: _native.cumulative_backward(energy),
        lambda: _fallback.cumulative_backward(energy),
        args.repeats,
        check_dp,
    )
    bench(
        "cumulative matrix (forward)",
        lambda: _native.cumulative_forward(energy, cl, cu, cr),
        lambda: _fallback.cumulative_forward(energy, cl, cu, cr),
        args.repeats,
        check_dp,
    )
    bench(
        "buffered match (p=1)",
        lambda: _native.buffered_match(pred, gt, 1),
        lambda: _fallback.buffered_match(pred, gt, 1),
        args.repeats,
        check_match,
    )


if __name__ == "__main__":
    main()
