"""Benchmark the compiled kernels against the pure-numpy fallback.

Usage: python benchmarks/bench_kernels.py [--repeat N]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from seedgrow._kernels import _fallback

try:
    from seedgrow._kernels import _native
except ImportError:
    _native = None


def timeit(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def cases():
    rng = np.random.default_rng(0)
    sa64 = rng.uniform(size=(64, 64, 64, 64)).astype(np.float32)
    sa32 = rng.uniform(size=(32, 32, 32, 32)).astype(np.float32)
    seeds = rng.integers(0, 64, size=(1000, 2))
    rows, cols = seeds[:, 0].astype(np.intp), seeds[:, 1].astype(np.intp)
    weights = rng.uniform(size=(32, 32))
    mask64 = rng.uniform(size=(64, 64))
    mask16 = rng.uniform(size=(16, 16))
    return [
        ("seed_slice_mean 64^4 x1000 seeds",
         lambda impl: impl.seed_slice_mean(sa64, rows, cols)),
        ("weighted_slice_mean 32^4",
         lambda impl: impl.weighted_slice_mean(sa32, weights)),
        ("bilinear 64 -> 512",
         lambda impl: impl.upsample_bilinear_2d(mask64, 512)),
        ("bilinear 16 -> 64",
         lambda impl: impl.upsample_bilinear_2d(mask16, 64)),
    ]


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    if _native is None:
        print("native extension not built; benchmarking fallback only")

    print(f"{'kernel':<38} {'python':>10} {'native':>10} {'speedup':>8}")
    for name, call in cases():
        py = timeit(lambda: call(_fallback), args.repeat)
        if _native is not None:
            nat = timeit(lambda: call(_native), args.repeat)
            out_py = call(_fallback)
            out_nat = call(_native)
            assert np.allclose(out_py, out_nat, atol=1e-9), name
            print(f"{name:<38} {py * 1e3:>8.2f}ms {nat * 1e3:>8.2f}ms "
                  f"{py / nat:>7.1f}x")
        else:
            print(f"{name:<38} {py * 1e3:>8.2f}ms {'-':>10} {'-':>8}")


if __name__ == "__main__":
    main()
