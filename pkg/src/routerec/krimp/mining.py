"""Frequent-itemset candidate mining for code-table construction."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .codetable import Itemset, KrimpError

DEFAULT_MAX_LEN = 6
DEFAULT_HARD_LIMIT = 5_000_000


class CandidateLimitError(KrimpError):
    def __init__(self, limit: int):
        super().__init__(f"candidate count exceeded the hard limit of {limit}")
        self.limit = limit


@dataclass(frozen=True)
class Candidate:
    items: Itemset
    support: int
    tid_mask: int  # bit i set when transaction i contains the itemset


def tag_tid_masks(transactions: Sequence[Sequence[int]]) -> dict[int, int]:
    masks: dict[int, int] = {}
    for tid, t in enumerate(transactions):
        bit = 1 << tid
        for tag in t:
            masks[tag] = masks.get(tag, 0) | bit
    return masks


def mask_to_rows(mask: int, n_transactions: int) -> np.ndarray:
    data = mask.to_bytes((n_transactions + 7) // 8, "little")
    bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8), bitorder="little")
    return np.flatnonzero(bits[:n_transactions]).astype(np.int64)


def mine_candidates_with_tids(
    transactions: Sequence[Sequence[int]],
    order_key: Optional[np.ndarray] = None,
    minsup: int = 1,
    max_len: int = DEFAULT_MAX_LEN,
    hard_limit: int = DEFAULT_HARD_LIMIT,
) -> list[Candidate]:
    """All itemsets of cardinality in [2, max_len] with support >= minsup.

    Returned in standard candidate order: descending support, then
    descending cardinality, then lexicographic on terms. Depth-first tidset
    intersection (Eclat); aborts once the candidate count passes hard_limit.
    """
    if minsup < 1:
        raise KrimpError(f"minsup must be >= 1, got {minsup}")
    if max_len < 2:
        return []

    def rank(tag: int) -> int:
        return int(order_key[tag]) if order_key is not None else tag

    masks = tag_tid_masks(transactions)
    items = sorted(
        (tag for tag, mask in masks.items() if mask.bit_count() >= minsup), key=rank
    )
    found: list[Candidate] = []

    def extend(prefix: tuple[int, ...], prefix_mask: int, start: int) -> None:
        for idx in range(start, len(items)):
            tag = items[idx]
            mask = prefix_mask & masks[tag]
            support = mask.bit_count()
            if support < minsup:
                continue
            itemset = prefix + (tag,)
            if len(itemset) >= 2:
                found.append(Candidate(itemset, support, mask))
                if len(found) > hard_limit:
                    raise CandidateLimitError(hard_limit)
            if len(itemset) < max_len:
                extend(itemset, mask, idx + 1)

    for idx, tag in enumerate(items):
        extend((tag,), masks[tag], idx + 1)

    found.sort(
        key=lambda c: (
            -c.support,
            -len(c.items),
            tuple(rank(i) for i in c.items),
        )
    )
    return found


def mine_candidates(
    transactions: Sequence[Sequence[int]],
    order_key: Optional[np.ndarray] = None,
    minsup: int = 1,
    max_len: int = DEFAULT_MAX_LEN,
    hard_limit: int = DEFAULT_HARD_LIMIT,
) -> list[Itemset]:
    return [
        c.items
        for c in mine_candidates_with_tids(
            transactions, order_key, minsup, max_len, hard_limit
        )
    ]
