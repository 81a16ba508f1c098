#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Usage: python benchmarks/bench_backends.py [--full]

Both backends produce bit-identical results (asserted here as a side
effect); the table reports best-of-N wall time and the speedup.
"""

import argparse
import sys
import time

from primecycles import _kernels_py

try:
    from primecycles import _kernels
except ImportError:
    _kernels = None


def best_of(fn, repeats):
    best = None
    result = None
    for _ in range(repeats):
        start = time.perf_counter()
        result = fn()
        elapsed = time.perf_counter() - start
        best = elapsed if best is None else min(best, elapsed)
    return best, result


def prime_mask(n):
    mask = bytearray(n + 1)
    for k in range(2, n + 1):
        if all(k % d for d in range(2, int(k**0.5) + 1)):
            mask[k] = 1
    return bytes(mask)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--full", action="store_true", help="larger problem sizes")
    args = parser.parse_args()

    sieve_limit = 20_000_000 if args.full else 5_000_000
    mc_trials = 100_000 if args.full else 20_000
    pair_trials = 50_000 if args.full else 10_000
    mc_n, pair_n = 50, 30

    mask_mc = prime_mask(mc_n)
    mask_pair = prime_mask(pair_n)
    bitmap = _kernels_py.sieve_bitmap(sieve_limit)

    cases = [
        (
            f"plain sieve to {sieve_limit:.0e}",
            lambda mod: mod.sieve_bitmap(sieve_limit),
            2,
        ),
        (
            f"segmented sieve to {sieve_limit:.0e}",
            lambda mod: mod.sieve_bitmap_segmented(sieve_limit),
            2,
        ),
        (
            f"extract primes to {sieve_limit:.0e}",
            lambda mod: mod.bitmap_to_primes(bitmap, sieve_limit),
            2,
        ),
        (
            f"MC all-prime n={mc_n}, {mc_trials} trials",
            lambda mod: mod.count_trials_all_prime(42, mc_n, 0, mc_trials, mask_mc),
            3,
        ),
        (
            f"MC order/product pair n={pair_n}, {pair_trials} trials",
            lambda mod: mod.count_trials_pair(42, pair_n, 0, pair_trials, mask_pair),
            3,
        ),
    ]

    if _kernels is None:
        print("compiled extension not available; showing the fallback only\n")

    header = f"{'kernel':<45} {'pure (s)':>10} {'compiled (s)':>13} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for name, fn, repeats in cases:
        t_pure, r_pure = best_of(lambda: fn(_kernels_py), repeats)
        if _kernels is None:
            print(f"{name:<45} {t_pure:>10.4f} {'-':>13} {'-':>8}")
            continue
        t_comp, r_comp = best_of(lambda: fn(_kernels), repeats)
        assert r_pure == r_comp, f"backend results differ for {name}"
        print(
            f"{name:<45} {t_pure:>10.4f} {t_comp:>13.4f} "
            f"{t_pure / t_comp:>7.1f}x"
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
