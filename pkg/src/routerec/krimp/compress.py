"""Code-table construction: greedy MDL acceptance with post-acceptance pruning."""
from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .codetable import (
    CodeTable,
    CodeTableEntry,
    CompressionStats,
    Itemset,
    KrimpError,
)
from .kernels import cover_usages, pack_rows
from .mining import (
    DEFAULT_HARD_LIMIT,
    DEFAULT_MAX_LEN,
    mask_to_rows,
    mine_candidates_with_tids,
    tag_tid_masks,
)

# Candidates must strictly shrink the total; this guards float-sum noise.
_GAIN_EPS = 1e-9


@dataclass
class CompressResult:
    table: CodeTable
    stats: CompressionStats
    step_totals: list[float]  # total after the initial table and each accepted step
    n_candidates: int
    accepted: int
    pruned: int

    @property
    def singleton_total_bits(self) -> float:
        return self.step_totals[0]


def _totals(usages: np.ndarray, content_bits: np.ndarray) -> tuple[float, float]:
    used = usages > 0
    total_usage = float(usages[used].sum())
    if total_usage <= 0:
        raise KrimpError("no entry has positive usage")
    lengths = -np.log2(usages[used] / total_usage)
    db_bits = float((usages[used] * lengths).sum())
    ct_bits = float(lengths.sum() + content_bits[used].sum())
    return db_bits, ct_bits


def _insert_at(vec: np.ndarray, pos: int, value) -> np.ndarray:
    out = np.empty(vec.shape[0] + 1, dtype=vec.dtype)
    out[:pos] = vec[:pos]
    out[pos] = value
    out[pos + 1 :] = vec[pos:]
    return out


def krimp_compress(
    transactions: Sequence[Sequence[int]],
    order_key: Optional[np.ndarray] = None,
    minsup: int = 1,
    max_len: int = DEFAULT_MAX_LEN,
    hard_limit: int = DEFAULT_HARD_LIMIT,
) -> CompressResult:
    """Build the code table that best compresses the given transactions.

    Starts from the singleton-only standard table. Candidates are tried in
    standard candidate order; each is spliced in at its cover-order slot,
    usages are recomputed by re-covering the transactions that contain it,
    and it stays only if the total encoded size strictly drops. After an
    acceptance, existing non-singleton entries whose usage decreased are
    revisited in ascending usage order and deleted permanently when deletion
    shrinks the total further. Singletons are never deleted.
    """
    if not transactions:
        raise KrimpError("cannot compress an empty database")
    n_txn = len(transactions)
    n_slots = (
        int(order_key.shape[0])
        if order_key is not None
        else max(tag for t in transactions for tag in t) + 1
    )
    txn_words = pack_rows(transactions, n_slots)

    tag_masks = tag_tid_masks(transactions)
    occurrences = {tag: mask.bit_count() for tag, mask in tag_masks.items()}
    total_occ = sum(occurrences.values())
    st_bits = {
        tag: -np.log2(occ / total_occ) for tag, occ in occurrences.items() if occ > 0
    }

    table = CodeTable(
        (
            CodeTableEntry((tag,), usage=occ, support=occ)
            for tag, occ in occurrences.items()
        ),
        order_key=order_key,
    )
    entry_words = pack_rows([e.items for e in table.entries], n_slots)
    entry_rows = [mask_to_rows(tag_masks[e.items[0]], n_txn) for e in table.entries]
    usages = np.array([e.usage for e in table.entries], dtype=np.int64)
    content_bits = np.array(
        [sum(st_bits[i] for i in e.items) for e in table.entries], dtype=np.float64
    )

    db_bits, ct_bits = _totals(usages, content_bits)
    cur_total = db_bits + ct_bits
    step_totals = [cur_total]

    candidates = mine_candidates_with_tids(
        transactions, order_key, minsup=minsup, max_len=max_len, hard_limit=hard_limit
    )
    accepted = 0
    pruned = 0
    cover_keys = [table.cover_key(e) for e in table.entries]

    for cand in candidates:
        entry = CodeTableEntry(cand.items, usage=0, support=cand.support)
        cand_key = table.cover_key(entry)
        pos = bisect_left(cover_keys, cand_key)
        rows = mask_to_rows(cand.tid_mask, n_txn)
        txn_aff = txn_words[rows]
        cand_row = pack_rows([cand.items], n_slots)[0]
        old_part = cover_usages(txn_aff, entry_words)
        new_part = cover_usages(txn_aff, entry_words, extra_row=cand_row, extra_pos=pos)
        new_usages = _insert_at(usages - old_part, pos, 0) + new_part
        new_content = _insert_at(
            content_bits, pos, sum(st_bits[i] for i in cand.items)
        )
        new_db, new_ct = _totals(new_usages, new_content)
        if cur_total - (new_db + new_ct) <= _GAIN_EPS:
            continue

        old_mapped = _insert_at(usages, pos, 0)
        table.entries.insert(pos, entry)
        cover_keys.insert(pos, cand_key)
        entry_words = np.insert(entry_words, pos, cand_row, axis=0)
        entry_rows.insert(pos, rows)
        usages = new_usages
        content_bits = new_content
        cur_total = new_db + new_ct
        accepted += 1

        prune_list = [
            table.entries[i]
            for i in range(len(table.entries))
            if i != pos
            and len(table.entries[i].items) >= 2
            and usages[i] < old_mapped[i]
        ]
        prune_list.sort(
            key=lambda e: (
                usages[table.entries.index(e)],
                table.cover_key(e),
            )
        )
        for victim in prune_list:
            idx = table.entries.index(victim)
            aff = entry_rows[idx]
            txn_aff = txn_words[aff]
            old_part = cover_usages(txn_aff, entry_words)
            new_part = cover_usages(txn_aff, entry_words, skip_idx=idx)
            trial = usages - old_part + new_part
            trial_usages = np.delete(trial, idx)
            trial_content = np.delete(content_bits, idx)
            t_db, t_ct = _totals(trial_usages, trial_content)
            if cur_total - (t_db + t_ct) > _GAIN_EPS:
                table.entries.pop(idx)
                cover_keys.pop(idx)
                entry_words = np.delete(entry_words, idx, axis=0)
                entry_rows.pop(idx)
                usages = trial_usages
                content_bits = trial_content
                cur_total = t_db + t_ct
                pruned += 1

        step_totals.append(cur_total)

    final = table.with_usages(usages)
    db_bits, ct_bits = _totals(usages, content_bits)
    return CompressResult(
        table=final,
        stats=CompressionStats(db_bits=db_bits, ct_bits=ct_bits),
        step_totals=step_totals,
        n_candidates=len(candidates),
        accepted=accepted,
        pruned=pruned,
    )
