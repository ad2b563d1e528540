#!/usr/bin/env python3
"""Compare the compiled kernels against the pure-Python reference.

Runs the three hot kernels (distance, fused survival reward, intercept
solve) over identical randomized workloads with both implementations and
prints per-call timings plus the speedup. The two backends must agree
numerically; this also spot-checks that.

Usage: python benchmarks/bench_kernels.py [--calls N]
"""

import argparse
import math
import random
import time

from medevacsim.kernels import _reference

try:
    from medevacsim.kernels import _fast
except ImportError:
    _fast = None


def bench(fn, args_list):
    start = time.perf_counter()
    for args in args_list:
        fn(*args)
    return (time.perf_counter() - start) / len(args_list)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--calls", type=int, default=200_000)
    args = parser.parse_args()
    rng = random.Random(12345)
    n = args.calls

    workloads = {
        "distance": [
            (rng.uniform(-200, 200), rng.uniform(-200, 200),
             rng.uniform(-200, 200), rng.uniform(-200, 200))
            for _ in range(n)
        ],
        "fused_reward": [
            (rng.uniform(0.0, 300.0), rng.choice([125.0, 63.0]), 7.0,
             rng.choice([0.0042, 0.0063]))
            for _ in range(n)
        ],
        "intercept_time": [
            (rng.uniform(-100, 100), rng.uniform(-100, 100),
             rng.uniform(-40, 40), rng.uniform(-40, 40), rng.uniform(50, 300))
            for _ in range(n)
        ],
    }

    if _fast is None:
        print("compiled extension not available; timing reference only")
    print(f"{'kernel':16s} {'python us':>10s} {'cython us':>10s} {'speedup':>8s}")
    for name, calls in workloads.items():
        ref_fn = getattr(_reference, name)
        t_ref = bench(ref_fn, calls)
        if _fast is None:
            print(f"{name:16s} {t_ref * 1e6:10.3f} {'-':>10s} {'-':>8s}")
            continue
        fast_fn = getattr(_fast, name)
        for sample in calls[:200]:
            a, b = ref_fn(*sample), fast_fn(*sample)
            assert math.isclose(a, b, rel_tol=1e-12, abs_tol=1e-12), (name, sample, a, b)
        t_fast = bench(fast_fn, calls)
        print(f"{name:16s} {t_ref * 1e6:10.3f} {t_fast * 1e6:10.3f} {t_ref / t_fast:7.1f}x")


if __name__ == "__main__":
    main()
