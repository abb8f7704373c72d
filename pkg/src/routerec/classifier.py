"""Shortest-encoding sentiment classification over per-class code tables.

Each class's code table encodes a transaction as the sum of the code lengths
in its greedy cover; the class with the shortest encoding wins. Code lengths
are Laplace smoothed (usage + 1) so in-class tags that lost all their covers
to larger itemsets still get a finite price. A tag a class never saw at all
(support 0 in its table) cannot be encoded by that class: its selection makes
the encoding infinite, which rules that class out for the transaction.
"""
from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import corpus as corpus_mod
from .corpus import LabeledDatabase, TagDictionary, degrade
from .krimp.codetable import (
    CodeTable,
    CodeTableEntry,
    KrimpError,
    cover,
    read_code_table,
    write_code_table,
)
from .krimp.compress import CompressResult, krimp_compress
from .krimp.kernels import cover_bits, pack_rows
from .krimp.mining import DEFAULT_HARD_LIMIT, DEFAULT_MAX_LEN


class ClassifierError(ValueError):
    pass


@dataclass
class SentimentModel:
    tables: dict[str, CodeTable]
    alphabet: frozenset[int]
    minsup: int
    order_key: Optional[np.ndarray] = None
    dictionary: Optional[TagDictionary] = None
    compression: dict[str, CompressResult] = field(default_factory=dict)

    @property
    def classes(self) -> list[str]:
        return sorted(self.tables)


@dataclass
class Classification:
    winner: str
    lengths: dict[str, float]


def train(
    db: LabeledDatabase,
    minsup: int,
    max_len: int = DEFAULT_MAX_LEN,
    hard_limit: int = DEFAULT_HARD_LIMIT,
) -> SentimentModel:
    """Build one code table per class and align their alphabets.

    Tags seen only in other classes are added as (usage 0, support 0)
    singletons so every table spans the full training alphabet.
    """
    parts = corpus_mod.partition_by_class(db)
    if len(parts) < 2:
        raise ClassifierError(f"need >= 2 classes to classify, got {sorted(parts)}")
    for label, part in parts.items():
        if len(part) == 0:
            raise ClassifierError(f"class {label!r} has no transactions")
    order_key = db.dictionary.lex_ranks() if len(db.dictionary) else None
    alphabet = db.alphabet()
    tables: dict[str, CodeTable] = {}
    compression: dict[str, CompressResult] = {}
    for label, part in parts.items():
        result = krimp_compress(
            part.transactions, order_key, minsup=minsup, max_len=max_len, hard_limit=hard_limit
        )
        table = result.table
        known = table.alphabet()
        for tag in alphabet - known:
            table.insert(CodeTableEntry((tag,), usage=0, support=0))
        tables[label] = table
        compression[label] = result
    return SentimentModel(
        tables=tables,
        alphabet=frozenset(alphabet),
        minsup=minsup,
        order_key=order_key,
        dictionary=db.dictionary,
        compression=compression,
    )


def laplace_code_bits(table: CodeTable) -> np.ndarray:
    """Per-entry classification code lengths, aligned with table order.

    Usages are incremented by one; entries the class never saw in training
    (support 0) stay unencodable and price as +inf.
    """
    adjusted = np.array([e.usage + 1 for e in table.entries], dtype=np.float64)
    bits = -np.log2(adjusted / adjusted.sum())
    for i, entry in enumerate(table.entries):
        if entry.support == 0:
            bits[i] = np.inf
    return bits


def _restrict(t: Sequence[int], alphabet: frozenset[int]) -> tuple[int, ...]:
    return tuple(tag for tag in t if tag in alphabet)


def encode_length(t: Sequence[int], table: CodeTable, model: SentimentModel) -> float:
    """Encoded length of t under one class table; +inf when unencodable."""
    restricted = _restrict(t, model.alphabet)
    if not restricted:
        raise ClassifierError("out-of-vocabulary transaction")
    if not set(restricted) <= table.alphabet():
        return math.inf
    bits = laplace_code_bits(table)
    by_items = {e.items: bits[i] for i, e in enumerate(table.entries)}
    return float(sum(by_items[items] for items in cover(restricted, table)))


def classify(t: Sequence[int], model: SentimentModel) -> Classification:
    """Assign t to the class whose table encodes it shortest.

    Ties break to the lexicographically smallest class label. A class that
    cannot encode t reports +inf; if no class can, the transaction is
    unclassifiable.
    """
    lengths = {label: encode_length(t, table, model) for label, table in sorted(model.tables.items())}
    winner = min(lengths, key=lambda label: (lengths[label], label))
    if math.isinf(lengths[winner]):
        raise ClassifierError("transaction is unclassifiable: no class can encode it")
    return Classification(winner=winner, lengths=lengths)


def _batch_lengths(
    transactions: Sequence[Sequence[int]], model: SentimentModel
) -> tuple[np.ndarray, list[str]]:
    """(classes x transactions) encoded-length matrix via the cover kernels."""
    labels = model.classes
    n_slots = (
        int(model.order_key.shape[0])
        if model.order_key is not None
        else max((tag for t in transactions for tag in t), default=0) + 1
    )
    restricted = [_restrict(t, model.alphabet) for t in transactions]
    txn_words = pack_rows(restricted, n_slots)
    out = np.full((len(labels), len(transactions)), np.inf)
    for row, label in enumerate(labels):
        table = model.tables[label]
        entry_words = pack_rows([e.items for e in table.entries], n_slots)
        bits = laplace_code_bits(table)
        table_alphabet = table.alphabet()
        ok = np.array(
            [len(r) > 0 and set(r) <= table_alphabet for r in restricted], dtype=bool
        )
        if ok.any():
            out[row, ok] = cover_bits(txn_words[ok], entry_words, bits)
    return out, labels


def classify_batch(
    transactions: Sequence[Sequence[int]], model: SentimentModel
) -> list[Optional[str]]:
    """Winner per transaction; None when no class can encode it."""
    if not transactions:
        return []
    lengths, labels = _batch_lengths(transactions, model)
    # argmin over rows; labels are sorted, so first-minimum = lex tie-break
    winners: list[Optional[str]] = []
    best = np.argmin(lengths, axis=0)
    for col, row in enumerate(best):
        winners.append(labels[row] if np.isfinite(lengths[row, col]) else None)
    return winners


@dataclass
class TruncateResult:
    degraded: LabeledDatabase
    partition: dict[str, list[tuple[int, ...]]]
    pairs: list[tuple[Optional[str], Optional[str]]]
    unclassifiable: list[int]


def truncate_classification(
    db: LabeledDatabase, delta: float, seed: int, model: SentimentModel
) -> TruncateResult:
    """Degrade every transaction, classify it, and partition by winner."""
    degraded = degrade(db, delta, seed)
    winners = classify_batch(degraded.transactions, model)
    partition: dict[str, list[tuple[int, ...]]] = {label: [] for label in model.classes}
    pairs: list[tuple[Optional[str], Optional[str]]] = []
    unclassifiable: list[int] = []
    for idx, (t, truth, pred) in enumerate(
        zip(degraded.transactions, degraded.labels, winners)
    ):
        pairs.append((truth, pred))
        if pred is None:
            unclassifiable.append(idx)
        else:
            partition[pred].append(t)
    return TruncateResult(
        degraded=degraded, partition=partition, pairs=pairs, unclassifiable=unclassifiable
    )


@dataclass
class DissimilarityHistogram:
    bin_width: float
    counts: dict[int, int]  # bin index b covers [b*width, (b+1)*width)
    pos_inf: int = 0
    neg_inf: int = 0
    undefined: int = 0  # both tables unable to encode

    def total(self) -> int:
        return sum(self.counts.values()) + self.pos_inf + self.neg_inf + self.undefined


def dissimilarity_histogram(
    db: LabeledDatabase,
    ct1: CodeTable,
    ct2: CodeTable,
    model: SentimentModel,
    bin_width: float = 50.0,
) -> DissimilarityHistogram:
    """Histogram of per-transaction (length under ct2 - length under ct1).

    Positive mass means the transactions are more characteristic of ct1's
    class: ct1 compresses them better.
    """
    if bin_width <= 0:
        raise ClassifierError("bin_width must be positive")
    hist = DissimilarityHistogram(bin_width=bin_width, counts={})
    for t in db.transactions:
        l1 = encode_length(t, ct1, model)
        l2 = encode_length(t, ct2, model)
        if math.isinf(l1) and math.isinf(l2):
            hist.undefined += 1
        elif math.isinf(l2):
            hist.pos_inf += 1
        elif math.isinf(l1):
            hist.neg_inf += 1
        else:
            bucket = math.floor((l2 - l1) / bin_width)
            hist.counts[bucket] = hist.counts.get(bucket, 0) + 1
    return hist


MANIFEST_NAME = "manifest.json"
DICTIONARY_NAME = "dictionary.tsv"


def _table_file(label: str) -> str:
    safe = "".join(c if c.isalnum() or c in "-_" else "_" for c in label)
    return f"ct_{safe}.txt"


def save_model(model: SentimentModel, directory: str) -> None:
    os.makedirs(directory, exist_ok=True)
    files: dict[str, str] = {}
    digest = hashlib.sha256()
    for label in model.classes:
        name = _table_file(label)
        path = os.path.join(directory, name)
        with open(path, "w", encoding="utf-8") as fh:
            write_code_table(model.tables[label], label, fh)
        with open(path, "rb") as fh:
            digest.update(fh.read())
        files[label] = name
    if model.dictionary is not None:
        corpus_mod.write_dictionary(model.dictionary, os.path.join(directory, DICTIONARY_NAME))
    manifest = {
        "classes": model.classes,
        "minsup": model.minsup,
        "alphabet_size": len(model.alphabet),
        "files": files,
        "content_hash": digest.hexdigest(),
    }
    with open(os.path.join(directory, MANIFEST_NAME), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_model(directory: str) -> SentimentModel:
    with open(os.path.join(directory, MANIFEST_NAME), encoding="utf-8") as fh:
        manifest = json.load(fh)
    dictionary = None
    order_key = None
    dict_path = os.path.join(directory, DICTIONARY_NAME)
    if os.path.exists(dict_path):
        dictionary = corpus_mod.read_dictionary(dict_path)
        order_key = dictionary.lex_ranks()
    tables: dict[str, CodeTable] = {}
    digest = hashlib.sha256()
    for label in manifest["classes"]:
        path = os.path.join(directory, manifest["files"][label])
        with open(path, "rb") as fh:
            digest.update(fh.read())
        with open(path, encoding="utf-8") as fh:
            file_label, table = read_code_table(fh, order_key=order_key)
        if file_label != label:
            raise ClassifierError(
                f"model file {path} holds class {file_label!r}, expected {label!r}"
            )
        tables[label] = table
    if digest.hexdigest() != manifest["content_hash"]:
        raise ClassifierError("model content hash mismatch; files were modified")
    alphabet = frozenset(tag for table in tables.values() for tag in table.alphabet())
    return SentimentModel(
        tables=tables,
        alphabet=alphabet,
        minsup=int(manifest["minsup"]),
        order_key=order_key,
        dictionary=dictionary,
    )


def model_from_tables(tables: dict[str, CodeTable], minsup: int = 1) -> SentimentModel:
    """Model over hand-built or verbatim-loaded tables."""
    alphabet = frozenset(tag for table in tables.values() for tag in table.alphabet())
    return SentimentModel(tables=dict(tables), alphabet=alphabet, minsup=minsup)
