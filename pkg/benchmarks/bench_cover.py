"""Benchmark the greedy-cover kernels: numba @njit vs the numpy fallback.

The cover loop reruns for every candidate tested during code-table
construction, so this is the hot path of training. Run with
ROUTEREC_NO_NUMBA=1 to confirm which backend the package itself selects.

Usage: python3 benchmarks/bench_cover.py [n_transactions] [n_tags]
"""
import random
import sys
import time

import numpy as np

from routerec.krimp.kernels import (
    HAVE_NUMBA,
    _cover_usages_np,
    pack_rows,
)


def build_case(n_txns: int, n_tags: int, seed: int = 11):
    rng = random.Random(seed)
    transactions = []
    for _ in range(n_txns):
        size = rng.randint(3, 10)
        transactions.append(tuple(sorted(rng.sample(range(n_tags), size))))
    # table: a few dozen itemsets plus all singletons, mimicking a built table
    itemsets = []
    for _ in range(40):
        base = rng.choice(transactions)
        k = rng.randint(2, min(4, len(base)))
        itemsets.append(tuple(sorted(rng.sample(base, k))))
    itemsets = sorted(set(itemsets), key=lambda s: (-len(s), s))
    entries = itemsets + [(t,) for t in range(n_tags)]
    return pack_rows(transactions, n_tags), pack_rows(entries, n_tags)


def bench(fn, *args, repeat: int = 5):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def main():
    n_txns = int(sys.argv[1]) if len(sys.argv) > 1 else 700
    n_tags = int(sys.argv[2]) if len(sys.argv) > 2 else 400
    txn_words, entry_words = build_case(n_txns, n_tags)
    no_extra = np.zeros(0, dtype=np.uint64)

    results = {}
    results["numpy"] = bench(_cover_usages_np, txn_words, entry_words, no_extra, -1, -1)

    if HAVE_NUMBA:
        from numba import njit

        from routerec.krimp.kernels import _cover_usages_py

        jit = njit(cache=True)(_cover_usages_py)
        jit(txn_words, entry_words, no_extra, -1, -1)  # compile outside timing
        results["numba"] = bench(jit, txn_words, entry_words, no_extra, -1, -1)
        got_np = _cover_usages_np(txn_words, entry_words, no_extra, -1, -1)
        got_jit = jit(txn_words, entry_words, no_extra, -1, -1)
        assert np.array_equal(got_np, got_jit), "backends disagree"
    else:
        print("numba unavailable or disabled; timing the fallback only")

    print(f"cover_usages over {n_txns} transactions x {entry_words.shape[0]} entries")
    for name, seconds in results.items():
        print(f"  {name:>6}: {seconds * 1e3:8.2f} ms")
    if "numba" in results:
        print(f"  speedup: {results['numpy'] / results['numba']:.1f}x")


if __name__ == "__main__":
    main()
