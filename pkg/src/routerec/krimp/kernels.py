"""Greedy-cover kernels over packed bitset rows.

Transactions and code-table entries are packed into uint64 word rows; the
greedy cover scans entries in table order and selects every entry that is a
subset of the not-yet-covered remainder of the transaction. This loop is the
hot path of code-table construction (it reruns for every candidate tested),
so it carries a numba @njit kernel with a pure-numpy fallback. Set
ROUTEREC_NO_NUMBA=1 to force the fallback; benchmarks/bench_cover.py
compares the two.
"""
from __future__ import annotations

import os

import numpy as np

_DISABLED = os.environ.get("ROUTEREC_NO_NUMBA", "") not in ("", "0")

if not _DISABLED:
    try:
        from numba import njit

        HAVE_NUMBA = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        HAVE_NUMBA = False
else:
    HAVE_NUMBA = False

USING_NUMBA = HAVE_NUMBA

_NO_ROW = np.zeros(0, dtype=np.uint64)


def words_for(n_items: int) -> int:
    return max(1, (n_items + 63) >> 6)


def pack_rows(itemsets, n_items: int) -> np.ndarray:
    """Pack itemset id-tuples into a (rows, words) uint64 bit matrix."""
    width = words_for(n_items)
    out = np.zeros((len(itemsets), width), dtype=np.uint64)
    for row, items in enumerate(itemsets):
        for item in items:
            out[row, item >> 6] |= np.uint64(1) << np.uint64(item & 63)
    return out


def unpack_row(row: np.ndarray) -> tuple[int, ...]:
    items = []
    for w, word in enumerate(row):
        word = int(word)
        while word:
            low = word & -word
            items.append((w << 6) + low.bit_length() - 1)
            word ^= low
    return tuple(items)


def _cover_usages_py(txn_words, entry_words, extra_row, extra_pos, skip_idx):
    n_txn, width = txn_words.shape
    n_entries = entry_words.shape[0]
    n_logical = n_entries + (1 if extra_pos >= 0 else 0)
    usages = np.zeros(n_logical, dtype=np.int64)
    for ti in range(n_txn):
        rem = txn_words[ti].copy()
        for li in range(n_logical):
            if extra_pos >= 0:
                if li == extra_pos:
                    row = extra_row
                elif li < extra_pos:
                    row = entry_words[li]
                else:
                    row = entry_words[li - 1]
            else:
                if li == skip_idx:
                    continue
                row = entry_words[li]
            subset = True
            for w in range(width):
                if row[w] & ~rem[w]:
                    subset = False
                    break
            if not subset:
                continue
            usages[li] += 1
            empty = True
            for w in range(width):
                rem[w] &= ~row[w]
                if rem[w]:
                    empty = False
            if empty:
                break
    return usages


def _cover_usages_np(txn_words, entry_words, extra_row, extra_pos, skip_idx):
    # Vectorized across transactions: one pass per logical entry.
    n_txn, _ = txn_words.shape
    n_entries = entry_words.shape[0]
    n_logical = n_entries + (1 if extra_pos >= 0 else 0)
    usages = np.zeros(n_logical, dtype=np.int64)
    if n_txn == 0:
        return usages
    rem = txn_words.copy()
    active = np.ones(n_txn, dtype=bool)
    for li in range(n_logical):
        if extra_pos >= 0:
            if li == extra_pos:
                row = extra_row
            elif li < extra_pos:
                row = entry_words[li]
            else:
                row = entry_words[li - 1]
        else:
            if li == skip_idx:
                continue
            row = entry_words[li]
        selected = active & ((rem & row) == row).all(axis=1)
        count = int(np.count_nonzero(selected))
        if count == 0:
            continue
        usages[li] = count
        rem[selected] &= ~row
        emptied = selected & ~rem.any(axis=1)
        if emptied.any():
            active &= ~emptied
            if not active.any():
                break
    return usages


def _cover_bits_py(txn_words, entry_words, entry_bits):
    n_txn, width = txn_words.shape
    n_entries = entry_words.shape[0]
    out = np.zeros(n_txn, dtype=np.float64)
    for ti in range(n_txn):
        rem = txn_words[ti].copy()
        total = 0.0
        for ei in range(n_entries):
            row = entry_words[ei]
            subset = True
            for w in range(width):
                if row[w] & ~rem[w]:
                    subset = False
                    break
            if not subset:
                continue
            total += entry_bits[ei]
            empty = True
            for w in range(width):
                rem[w] &= ~row[w]
                if rem[w]:
                    empty = False
            if empty:
                break
        out[ti] = total
    return out


def _cover_bits_np(txn_words, entry_words, entry_bits):
    n_txn, _ = txn_words.shape
    out = np.zeros(n_txn, dtype=np.float64)
    if n_txn == 0:
        return out
    rem = txn_words.copy()
    active = np.ones(n_txn, dtype=bool)
    for ei in range(entry_words.shape[0]):
        row = entry_words[ei]
        selected = active & ((rem & row) == row).all(axis=1)
        if not selected.any():
            continue
        out[selected] += entry_bits[ei]
        rem[selected] &= ~row
        emptied = selected & ~rem.any(axis=1)
        if emptied.any():
            active &= ~emptied
            if not active.any():
                break
    return out


if HAVE_NUMBA:
    _cover_usages_jit = njit(cache=True)(_cover_usages_py)
    _cover_bits_jit = njit(cache=True)(_cover_bits_py)


def cover_usages(
    txn_words: np.ndarray,
    entry_words: np.ndarray,
    extra_row: np.ndarray | None = None,
    extra_pos: int = -1,
    skip_idx: int = -1,
) -> np.ndarray:
    """Per-entry selection counts for the greedy cover of every transaction.

    ``extra_row``/``extra_pos`` evaluate the table with one extra entry
    spliced in at a logical position; ``skip_idx`` evaluates it with one
    entry left out. At most one of the two may be used per call.
    """
    if extra_pos >= 0 and skip_idx >= 0:
        raise ValueError("extra_pos and skip_idx are mutually exclusive")
    row = extra_row if extra_row is not None else _NO_ROW
    if USING_NUMBA:
        return _cover_usages_jit(txn_words, entry_words, row, extra_pos, skip_idx)
    return _cover_usages_np(txn_words, entry_words, row, extra_pos, skip_idx)


def cover_bits(
    txn_words: np.ndarray, entry_words: np.ndarray, entry_bits: np.ndarray
) -> np.ndarray:
    """Per-transaction encoded length: sum of entry_bits over the cover."""
    if USING_NUMBA:
        return _cover_bits_jit(txn_words, entry_words, entry_bits)
    return _cover_bits_np(txn_words, entry_words, entry_bits)
