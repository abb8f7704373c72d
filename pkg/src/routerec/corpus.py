"""Transaction data model: tag dictionary, place records, labeled databases.

A transaction is the tag-set extracted from one review. Tags are interned
into a dense-id dictionary; transactions store ids sorted by the
lexicographic order of their terms, which is the canonical storage order
used by every downstream consumer.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence, TextIO

import numpy as np

POSITIVE = "pos"
NEGATIVE = "neg"

# ceil((1-delta)*n) on floats can land epsilon above an exact integer
# (e.g. 0.67: (1-0.67)*100 = 33.000000000000004); shave before ceiling.
_CEIL_EPS = 1e-9


class CorpusError(ValueError):
    pass


class IngestError(CorpusError):
    """Malformed place record, carries the 1-based source line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no
        self.reason = message


class TagDictionary:
    """Bijective term <-> dense integer id interning table."""

    def __init__(self) -> None:
        self._terms: list[str] = []
        self._ids: dict[str, int] = {}

    def __len__(self) -> int:
        return len(self._terms)

    def __contains__(self, term: str) -> bool:
        return term in self._ids

    def __eq__(self, other: object) -> bool:
        return isinstance(other, TagDictionary) and self._terms == other._terms

    def intern(self, term: str) -> int:
        if not term:
            raise CorpusError("empty tag term")
        tag_id = self._ids.get(term)
        if tag_id is None:
            tag_id = len(self._terms)
            self._terms.append(term)
            self._ids[term] = tag_id
        return tag_id

    def id_of(self, term: str) -> int:
        return self._ids[term]

    def term_of(self, tag_id: int) -> str:
        return self._terms[tag_id]

    @property
    def terms(self) -> Sequence[str]:
        return tuple(self._terms)

    def lex_ranks(self) -> np.ndarray:
        """Rank of each id's term in lexicographic term order.

        Downstream orderings ("lexicographic by term") compare these ranks,
        so cross-module tie-breaking is consistent with the stored terms.
        """
        order = sorted(range(len(self._terms)), key=lambda i: self._terms[i])
        ranks = np.empty(len(self._terms), dtype=np.int64)
        for rank, tag_id in enumerate(order):
            ranks[tag_id] = rank
        return ranks

    def sort_tags(self, tag_ids: Iterable[int]) -> tuple[int, ...]:
        return tuple(sorted(set(tag_ids), key=self.term_of))


@dataclass(frozen=True)
class Place:
    id: str
    name: str
    address: str
    review: str
    lat: float
    lon: float
    sentiment: Optional[str] = None

    def __post_init__(self) -> None:
        if not self.name:
            raise CorpusError("place name must be non-empty")
        if not -90.0 <= self.lat <= 90.0:
            raise CorpusError("latitude out of range")
        if not -180.0 <= self.lon <= 180.0:
            raise CorpusError("longitude out of range")
        if self.sentiment is not None and self.sentiment not in (POSITIVE, NEGATIVE):
            raise CorpusError(f"unknown sentiment label {self.sentiment!r}")


@dataclass
class LabeledDatabase:
    """Ordered multiset of transactions with optional per-transaction labels."""

    transactions: list[tuple[int, ...]]
    labels: list[Optional[str]]
    dictionary: TagDictionary

    def __post_init__(self) -> None:
        if len(self.transactions) != len(self.labels):
            raise CorpusError("one label slot per transaction required")
        n = len(self.dictionary)
        for t in self.transactions:
            for tag in t:
                if not 0 <= tag < n:
                    raise CorpusError(f"tag id {tag} not in dictionary")

    def __len__(self) -> int:
        return len(self.transactions)

    @property
    def classes(self) -> frozenset[str]:
        return frozenset(l for l in self.labels if l is not None)

    def is_fully_labeled(self) -> bool:
        return all(l is not None for l in self.labels)

    def alphabet(self) -> frozenset[int]:
        return frozenset(tag for t in self.transactions for tag in t)


@dataclass
class IngestReport:
    places: list[Place]
    skipped: list[tuple[int, str]] = field(default_factory=list)


_REQUIRED_KEYS = ("id", "name", "address", "review", "lat", "lon")


def _place_from_record(record: dict, line_no: int) -> Place:
    for key in _REQUIRED_KEYS:
        if key not in record:
            raise IngestError(line_no, f"missing key {key!r}")
    label = record.get("label")
    if label is not None and label not in (POSITIVE, NEGATIVE):
        raise IngestError(line_no, f"label must be 'pos' or 'neg', got {label!r}")
    try:
        return Place(
            id=str(record["id"]),
            name=str(record["name"]),
            address=str(record["address"]),
            review=str(record["review"]),
            lat=float(record["lat"]),
            lon=float(record["lon"]),
            sentiment=label,
        )
    except (CorpusError, TypeError, ValueError) as exc:
        raise IngestError(line_no, str(exc)) from exc


def ingest_places(source: TextIO, strict: bool = False) -> IngestReport:
    """Parse a JSON Lines stream of place records.

    Malformed records are skipped and reported with their line number;
    with ``strict`` they abort the ingest instead.
    """
    report = IngestReport(places=[])
    for line_no, line in enumerate(source, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise IngestError(line_no, f"invalid JSON: {exc.msg}") from exc
            if not isinstance(record, dict):
                raise IngestError(line_no, "record is not a JSON object")
            report.places.append(_place_from_record(record, line_no))
        except IngestError as exc:
            if strict:
                raise
            report.skipped.append((exc.line_no, exc.reason))
    return report


@dataclass
class BuildReport:
    db: LabeledDatabase
    place_ids: list[str]
    dropped: list[str]


def build_database(
    places: Sequence[Place],
    tagger: Callable[[str], Iterable[str]],
    dictionary: Optional[TagDictionary] = None,
) -> BuildReport:
    """Turn place reviews into one transaction per place.

    ``tagger`` maps review text to tag terms. Places yielding no tags are
    dropped (they stay searchable elsewhere, they just carry no transaction).
    """
    dictionary = dictionary if dictionary is not None else TagDictionary()
    transactions: list[tuple[int, ...]] = []
    labels: list[Optional[str]] = []
    place_ids: list[str] = []
    dropped: list[str] = []
    for place in places:
        terms = [term for term in tagger(place.review) if term]
        if not terms:
            dropped.append(place.id)
            continue
        ids = {dictionary.intern(term) for term in terms}
        transactions.append(dictionary.sort_tags(ids))
        labels.append(place.sentiment)
        place_ids.append(place.id)
    if not transactions:
        raise CorpusError("empty database: no place yielded any tag")
    db = LabeledDatabase(transactions, labels, dictionary)
    return BuildReport(db=db, place_ids=place_ids, dropped=dropped)


def partition_by_class(db: LabeledDatabase) -> dict[str, LabeledDatabase]:
    """Split by label; partition members carry no labels of their own."""
    for index, label in enumerate(db.labels):
        if label is None:
            raise CorpusError(f"unlabeled transaction at index {index}")
    parts: dict[str, list[tuple[int, ...]]] = {}
    for t, label in zip(db.transactions, db.labels):
        parts.setdefault(label, []).append(t)
    return {
        label: LabeledDatabase(ts, [None] * len(ts), db.dictionary)
        for label, ts in sorted(parts.items())
    }


def keep_count(n_tags: int, delta: float) -> int:
    """Number of tags a transaction keeps when degraded by ``delta``."""
    return max(1, math.ceil((1.0 - delta) * n_tags - _CEIL_EPS))


def degrade(db: LabeledDatabase, delta: float, seed: int) -> LabeledDatabase:
    """Randomly drop tags from every transaction, keeping a (1-delta) share.

    Each transaction keeps exactly ``max(1, ceil((1-delta)*|t|))`` tags,
    sampled without replacement from a generator seeded with ``seed``, and
    is re-stored in lexicographic term order. Deterministic per (db, delta,
    seed); labels are preserved.
    """
    if not 0.0 <= delta < 1.0:
        raise CorpusError(f"delta must be in [0, 1), got {delta}")
    if delta == 0.0:
        return LabeledDatabase(list(db.transactions), list(db.labels), db.dictionary)
    rng = np.random.default_rng(seed)
    degraded: list[tuple[int, ...]] = []
    for t in db.transactions:
        keep = keep_count(len(t), delta)
        if keep >= len(t):
            degraded.append(t)
            continue
        picked = rng.choice(len(t), size=keep, replace=False)
        degraded.append(db.dictionary.sort_tags(t[i] for i in picked))
    return LabeledDatabase(degraded, list(db.labels), db.dictionary)


def write_transactions(db: LabeledDatabase, path: str, dictionary_path: Optional[str] = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for t, label in zip(db.transactions, db.labels):
            ids = " ".join(str(tag) for tag in t)
            fh.write(f"{ids} | {label}\n" if label is not None else f"{ids}\n")
    if dictionary_path is not None:
        write_dictionary(db.dictionary, dictionary_path)


def write_dictionary(dictionary: TagDictionary, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for tag_id, term in enumerate(dictionary.terms):
            fh.write(f"{tag_id}\t{term}\n")


def read_dictionary(path: str) -> TagDictionary:
    dictionary = TagDictionary()
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            tag_id_text, sep, term = line.partition("\t")
            if not sep or not term:
                raise CorpusError(f"dictionary line {line_no}: expected 'id<TAB>term'")
            if int(tag_id_text) != len(dictionary):
                raise CorpusError(f"dictionary line {line_no}: ids must be dense and in order")
            dictionary.intern(term)
    return dictionary


def read_transactions(path: str, dictionary: TagDictionary) -> LabeledDatabase:
    transactions: list[tuple[int, ...]] = []
    labels: list[Optional[str]] = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            ids_text, sep, label = line.partition("|")
            label = label.strip() if sep else None
            try:
                ids = [int(token) for token in ids_text.split()]
            except ValueError as exc:
                raise CorpusError(f"transaction line {line_no}: {exc}") from exc
            if not ids:
                raise CorpusError(f"transaction line {line_no}: empty transaction")
            transactions.append(dictionary.sort_tags(ids))
            labels.append(label or None)
    return LabeledDatabase(transactions, labels, dictionary)
