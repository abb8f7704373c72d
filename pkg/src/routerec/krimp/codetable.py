"""Code tables: ordered itemset entries, greedy cover, encoded sizes."""
from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass, replace
from typing import Iterable, Iterator, Optional, Sequence, TextIO

import numpy as np

Itemset = tuple[int, ...]


class KrimpError(ValueError):
    pass


@dataclass(frozen=True)
class CodeTableEntry:
    items: Itemset
    usage: int
    support: int

    def __post_init__(self) -> None:
        if not self.items:
            raise KrimpError("empty itemset")
        if self.usage < 0 or self.support < 0:
            raise KrimpError("usage and support must be non-negative")


@dataclass(frozen=True)
class CompressionStats:
    db_bits: float
    ct_bits: float

    @property
    def total_bits(self) -> float:
        return self.db_bits + self.ct_bits


def _identity_key(items: Itemset) -> tuple[int, ...]:
    return items


class CodeTable:
    """Entries kept in standard cover order.

    Standard cover order: descending itemset cardinality, then descending
    support, then lexicographic on terms. ``order_key`` maps tag id to the
    lexicographic rank of its term; without one, ids order themselves.
    """

    def __init__(
        self,
        entries: Iterable[CodeTableEntry] = (),
        order_key: Optional[np.ndarray] = None,
    ) -> None:
        self.order_key = order_key
        self.entries: list[CodeTableEntry] = []
        for entry in entries:
            self.insert(entry)

    def rank_tuple(self, items: Itemset) -> tuple[int, ...]:
        if self.order_key is None:
            return items
        return tuple(int(self.order_key[i]) for i in items)

    def sort_items(self, items: Iterable[int]) -> Itemset:
        if self.order_key is None:
            return tuple(sorted(set(items)))
        return tuple(sorted(set(items), key=lambda i: int(self.order_key[i])))

    def cover_key(self, entry: CodeTableEntry):
        return (-len(entry.items), -entry.support, self.rank_tuple(entry.items))

    def insert(self, entry: CodeTableEntry) -> int:
        items = self.sort_items(entry.items)
        if items != entry.items:
            entry = replace(entry, items=items)
        if any(e.items == entry.items for e in self.entries):
            raise KrimpError(f"duplicate itemset {entry.items}")
        keys = [self.cover_key(e) for e in self.entries]
        pos = bisect_left(keys, self.cover_key(entry))
        self.entries.insert(pos, entry)
        return pos

    def insertion_index(self, entry: CodeTableEntry) -> int:
        keys = [self.cover_key(e) for e in self.entries]
        return bisect_left(keys, self.cover_key(entry))

    def remove(self, items: Itemset) -> CodeTableEntry:
        for i, entry in enumerate(self.entries):
            if entry.items == items:
                return self.entries.pop(i)
        raise KrimpError(f"no entry {items}")

    def __iter__(self) -> Iterator[CodeTableEntry]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, CodeTable) and self.entries == other.entries

    def alphabet(self) -> frozenset[int]:
        return frozenset(i for e in self.entries for i in e.items)

    def singletons(self) -> dict[int, CodeTableEntry]:
        return {e.items[0]: e for e in self.entries if len(e.items) == 1}

    def with_usages(self, usages: Sequence[int]) -> "CodeTable":
        if len(usages) != len(self.entries):
            raise KrimpError("usage vector length mismatch")
        table = CodeTable(order_key=self.order_key)
        table.entries = [
            replace(e, usage=int(u)) for e, u in zip(self.entries, usages)
        ]
        return table


def cover(t: Sequence[int], table: CodeTable) -> list[Itemset]:
    """Greedy cover: scan in table order, select subsets of the remainder.

    Selected itemsets are pairwise disjoint and union to t exactly.
    """
    remaining = set(t)
    selected: list[Itemset] = []
    for entry in table.entries:
        if not remaining:
            break
        if remaining.issuperset(entry.items):
            selected.append(entry.items)
            remaining.difference_update(entry.items)
    if remaining:
        tag = min(remaining)
        raise KrimpError(f"uncoverable tag {tag}: no singleton entry in table")
    return selected


def code_lengths(table: CodeTable, laplace: bool = False) -> dict[Itemset, float]:
    """Optimal code length per entry: -log2 of its relative usage.

    With ``laplace`` every usage is incremented by one first. Entries whose
    adjusted usage is zero have no code and are excluded.
    """
    add = 1 if laplace else 0
    total = sum(e.usage + add for e in table.entries)
    if total <= 0:
        raise KrimpError("all adjusted usages are zero; no code lengths exist")
    return {
        e.items: -math.log2((e.usage + add) / total)
        for e in table.entries
        if e.usage + add > 0
    }


def singleton_standard_table(
    transactions: Sequence[Sequence[int]],
    order_key: Optional[np.ndarray] = None,
    alphabet: Optional[Iterable[int]] = None,
) -> CodeTable:
    """Singleton-only table; usage = support = occurrence count in the db."""
    counts: dict[int, int] = {}
    for t in transactions:
        for tag in t:
            counts[tag] = counts.get(tag, 0) + 1
    if alphabet is not None:
        for tag in alphabet:
            counts.setdefault(tag, 0)
    if not counts:
        raise KrimpError("empty database has no standard table")
    return CodeTable(
        (CodeTableEntry((tag,), usage=n, support=n) for tag, n in counts.items()),
        order_key=order_key,
    )


def standard_code_lengths(
    transactions: Sequence[Sequence[int]],
    order_key: Optional[np.ndarray] = None,
) -> dict[int, float]:
    st = singleton_standard_table(transactions, order_key=order_key)
    return {items[0]: bits for items, bits in code_lengths(st).items()}


def encoded_db_size(transactions: Sequence[Sequence[int]], table: CodeTable) -> float:
    """Sum over transactions of the code lengths in their greedy covers."""
    lengths = code_lengths(table)
    total = 0.0
    for t in transactions:
        for items in cover(t, table):
            bits = lengths.get(items)
            if bits is None:
                raise KrimpError(
                    f"cover selected zero-usage entry {items}; "
                    "table usages are inconsistent with this database"
                )
            total += bits
    return total


def encoded_ct_size(table: CodeTable, st_lengths: dict[int, float]) -> float:
    """Code-table size: per used entry, its code plus its contents in
    singleton standard-table codes."""
    lengths = code_lengths(table)
    total = 0.0
    for entry in table.entries:
        if entry.usage == 0:
            continue
        total += lengths[entry.items]
        for item in entry.items:
            total += st_lengths[item]
    return total


def total_size(
    transactions: Sequence[Sequence[int]],
    table: CodeTable,
    st_lengths: Optional[dict[int, float]] = None,
) -> CompressionStats:
    if st_lengths is None:
        st_lengths = standard_code_lengths(transactions, order_key=table.order_key)
    return CompressionStats(
        db_bits=encoded_db_size(transactions, table),
        ct_bits=encoded_ct_size(table, st_lengths),
    )


def write_code_table(table: CodeTable, label: str, fh: TextIO) -> None:
    """Entry lines mirror printed tables: tag ids then " (usage,support)"."""
    fh.write(f"CT {label} {len(table.entries)}\n")
    for entry in table.entries:
        ids = " ".join(str(i) for i in entry.items)
        fh.write(f"{ids} ({entry.usage},{entry.support})\n")


def read_code_table(
    fh: TextIO, order_key: Optional[np.ndarray] = None
) -> tuple[str, CodeTable]:
    header = fh.readline().split()
    if len(header) != 3 or header[0] != "CT":
        raise KrimpError("expected header 'CT <class> <num_entries>'")
    label, n_entries = header[1], int(header[2])
    table = CodeTable(order_key=order_key)
    for _ in range(n_entries):
        line = fh.readline().strip()
        if not line:
            raise KrimpError(f"truncated code table for class {label}")
        ids_text, _, counts = line.rpartition("(")
        if not counts.endswith(")"):
            raise KrimpError(f"malformed entry line: {line!r}")
        usage_text, _, support_text = counts[:-1].partition(",")
        items = tuple(int(tok) for tok in ids_text.split())
        table.insert(
            CodeTableEntry(items, usage=int(usage_text), support=int(support_text))
        )
    return label, table
