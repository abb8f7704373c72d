"""Boosted relevance scoring for place candidates.

The total score multiplies a practical TF-IDF core (tf, squared idf, field
norm, query coordination, query norm) by a five-factor boost per matched
term: match-length, sentiment, distance band, popularity, and field match.
Every boost factor lies in [0, 3]; a zero factor annihilates the term.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .corpus import POSITIVE, Place

_WORD_RE = re.compile(r"[a-z0-9]+")

# Distance bands in meters: walking, short drive, long drive, too far.
BAND_WALK_M = 1_000.0
BAND_NEAR_M = 2_000.0
BAND_FAR_M = 5_000.0


class ScoringError(ValueError):
    pass


def tokenize(text: str) -> list[str]:
    return _WORD_RE.findall(text.lower())


@dataclass(frozen=True)
class Query:
    raw: str
    terms: tuple[str, ...]
    phrases: tuple[tuple[str, ...], ...]


def parse_query(raw: str) -> Query:
    tokens = tokenize(raw)
    terms = tuple(dict.fromkeys(tokens))
    runs: list[tuple[str, ...]] = []
    for segment in re.split(r"[^\sa-z0-9]+", raw.lower()):
        words = _WORD_RE.findall(segment)
        if len(words) >= 2:
            runs.append(tuple(words))
    return Query(raw=raw, terms=terms, phrases=tuple(runs))


@dataclass
class FieldDoc:
    place_id: str
    name_terms: tuple[str, ...]
    address_terms: tuple[str, ...]
    review_terms: tuple[str, ...]
    sentiment: Optional[str] = None
    route_distance_m: Optional[float] = None

    @classmethod
    def from_place(cls, place: Place, route_distance_m: Optional[float] = None) -> "FieldDoc":
        return cls(
            place_id=place.id,
            name_terms=tuple(tokenize(place.name)),
            address_terms=tuple(tokenize(place.address)),
            review_terms=tuple(tokenize(place.review)),
            sentiment=place.sentiment,
            route_distance_m=route_distance_m,
        )

    def term_count(self, term: str) -> int:
        return (
            self.name_terms.count(term)
            + self.address_terms.count(term)
            + self.review_terms.count(term)
        )

    def contains(self, term: str) -> bool:
        return (
            term in self.name_terms
            or term in self.address_terms
            or term in self.review_terms
        )


@dataclass
class IndexStats:
    n_docs: int
    df: dict[str, int]


def build_index_stats(docs: Iterable[FieldDoc]) -> IndexStats:
    df: dict[str, int] = {}
    n = 0
    for doc in docs:
        n += 1
        terms = set(doc.name_terms) | set(doc.address_terms) | set(doc.review_terms)
        for term in terms:
            df[term] = df.get(term, 0) + 1
    return IndexStats(n_docs=n, df=df)


def w_length(q: Query, d: FieldDoc) -> int:
    """Unique query terms found anywhere in the document, capped at three."""
    return min(3, sum(1 for term in q.terms if d.contains(term)))


def w_sentiment(d: FieldDoc, wl: float) -> float:
    """Full weight for positive sentiment, half otherwise.

    Unknown sentiment takes the downgrade branch: unreviewed places should
    not outrank positively reviewed ones.
    """
    return float(wl) if d.sentiment == POSITIVE else wl / 2.0


def w_dist(route_distance_m: Optional[float]) -> int:
    """Banded distance weight; unknown distance scores 0 ("too far away")."""
    if route_distance_m is None:
        return 0
    if route_distance_m < 0:
        raise ScoringError("route distance must be non-negative")
    if route_distance_m <= BAND_WALK_M:
        return 3
    if route_distance_m <= BAND_NEAR_M:
        return 2
    if route_distance_m <= BAND_FAR_M:
        return 1
    return 0


def w_pop(term: str, d: FieldDoc) -> int:
    """Popularity: name and address 3, one of them 2, review only 1."""
    in_name = term in d.name_terms
    in_address = term in d.address_terms
    if in_name and in_address:
        return 3
    if in_name or in_address:
        return 2
    if term in d.review_terms:
        return 1
    return 0


def w_field(term: str, d: FieldDoc) -> int:
    """Field match: name 3, review 2, address 1; highest band wins."""
    if term in d.name_terms:
        return 3
    if term in d.review_terms:
        return 2
    if term in d.address_terms:
        return 1
    return 0


@dataclass(frozen=True)
class BoostBreakdown:
    w_length: float
    w_sentiment: float
    w_dist: float
    w_pop: float
    w_field: float

    @property
    def product(self) -> float:
        return self.w_length * self.w_sentiment * self.w_dist * self.w_pop * self.w_field


def boost(term: str, d: FieldDoc, q: Query) -> BoostBreakdown:
    wl = w_length(q, d)
    return BoostBreakdown(
        w_length=float(wl),
        w_sentiment=w_sentiment(d, wl),
        w_dist=float(w_dist(d.route_distance_m)),
        w_pop=float(w_pop(term, d)),
        w_field=float(w_field(term, d)),
    )


@dataclass(frozen=True)
class TermScore:
    term: str
    tf: float
    idf: float
    boost: Optional[BoostBreakdown]
    norm: float

    @property
    def boost_value(self) -> float:
        return 1.0 if self.boost is None else self.boost.product

    @property
    def contribution(self) -> float:
        return self.tf * self.idf * self.idf * self.boost_value * self.norm


@dataclass
class ScoreReport:
    terms: list[TermScore]
    query_norm: float
    coord: float
    total: float


def _idf(term: str, stats: IndexStats) -> float:
    return 1.0 + math.log(stats.n_docs / (stats.df.get(term, 0) + 1))


def _field_norm(term: str, d: FieldDoc) -> float:
    band = w_field(term, d)
    if band == 3:
        return 1.0 / math.sqrt(len(d.name_terms))
    if band == 2:
        return 1.0 / math.sqrt(len(d.review_terms))
    if band == 1:
        return 1.0 / math.sqrt(len(d.address_terms))
    return 0.0


def score(
    q: Query, d: FieldDoc, stats: IndexStats, boosts_enabled: bool = True
) -> ScoreReport:
    """Per-term decomposed score; terms absent from the document add 0.

    With ``boosts_enabled`` off every matched term's boost is 1, which is
    the relevance-only baseline.
    """
    if not q.terms:
        raise ScoringError("empty query")
    term_scores: list[TermScore] = []
    matched = 0
    for term in q.terms:
        if not d.contains(term):
            continue
        matched += 1
        term_scores.append(
            TermScore(
                term=term,
                tf=math.sqrt(d.term_count(term)),
                idf=_idf(term, stats),
                boost=boost(term, d, q) if boosts_enabled else None,
                norm=_field_norm(term, d),
            )
        )
    coord = matched / len(q.terms)
    query_norm = 1.0 / math.sqrt(sum(_idf(t, stats) ** 2 for t in q.terms))
    total = query_norm * coord * sum(ts.contribution for ts in term_scores)
    return ScoreReport(terms=term_scores, query_norm=query_norm, coord=coord, total=total)


def rank_candidates(
    q: Query,
    docs: Sequence[FieldDoc],
    stats: IndexStats,
    limit: Optional[int] = None,
    boosts_enabled: bool = True,
) -> list[tuple[str, ScoreReport]]:
    """Descending total; ties by ascending route distance then place id.

    Zero-score documents are excluded; the list is cut at ``limit``.
    """
    ranked: list[tuple[str, ScoreReport]] = []
    for doc in docs:
        report = score(q, doc, stats, boosts_enabled=boosts_enabled)
        if report.total > 0.0:
            ranked.append((doc.place_id, report))
    distances = {doc.place_id: doc.route_distance_m for doc in docs}

    def sort_key(item: tuple[str, ScoreReport]):
        place_id, report = item
        distance = distances.get(place_id)
        return (
            -report.total,
            distance if distance is not None else math.inf,
            place_id,
        )

    ranked.sort(key=sort_key)
    return ranked[:limit] if limit is not None else ranked
