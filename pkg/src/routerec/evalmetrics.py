"""Classification metrics and top-k ranked-list comparison measures.

The list measures follow the footrule-with-placement scheme: elements
present in only one top-k list are placed at rank k+1, F normalizes the
distance into [0,1] (1 = identically ranked), G = 1 - F, and M compares
reciprocal ranks, which is robust to elements indexed by only one system.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, TextIO


class MetricsError(ValueError):
    pass


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int
    unclassifiable: int = 0

    @property
    def classified(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @property
    def total(self) -> int:
        return self.classified + self.unclassifiable


@dataclass(frozen=True)
class ClassificationMetrics:
    counts: ConfusionCounts
    precision: Optional[float]
    recall: Optional[float]
    f1: Optional[float]
    tnr: Optional[float]
    accuracy: Optional[float]
    ppcr: Optional[float]


def _ratio(num: int, den: int) -> Optional[float]:
    return num / den if den else None


def classification_metrics(
    pairs: Sequence[tuple[Optional[str], Optional[str]]], positive_class: str
) -> ClassificationMetrics:
    """Six measures from (truth, prediction) pairs.

    Pairs with prediction None count as unclassifiable and stay out of the
    confusion counts. Ratios with a zero denominator are None, not 0.
    """
    if not pairs:
        raise MetricsError("no classified pairs")
    tp = fp = tn = fn = unclassifiable = 0
    for truth, pred in pairs:
        if pred is None:
            unclassifiable += 1
        elif truth == positive_class:
            if pred == positive_class:
                tp += 1
            else:
                fn += 1
        else:
            if pred == positive_class:
                fp += 1
            else:
                tn += 1
    counts = ConfusionCounts(tp=tp, fp=fp, tn=tn, fn=fn, unclassifiable=unclassifiable)
    precision = _ratio(tp, tp + fp)
    recall = _ratio(tp, tp + fn)
    f1 = None
    if precision is not None and recall is not None and precision + recall > 0:
        f1 = 2 * precision * recall / (precision + recall)
    return ClassificationMetrics(
        counts=counts,
        precision=precision,
        recall=recall,
        f1=f1,
        tnr=_ratio(tn, tn + fp),
        accuracy=_ratio(tp + tn, counts.classified),
        ppcr=_ratio(tp + fp, counts.classified),
    )


RankedList = Sequence[str]


def _check_unique(elements: RankedList, which: str) -> None:
    if len(set(elements)) != len(elements):
        raise MetricsError(f"duplicate elements in {which} list")


@dataclass(frozen=True)
class FootruleParts:
    overlap: frozenset[str]  # Z
    first_only: frozenset[str]  # S
    second_only: frozenset[str]  # T


def footrule_distance(
    l1: RankedList, l2: RankedList, k: int
) -> tuple[float, FootruleParts]:
    """Spearman footrule over top-k prefixes with rank-(k+1) placement.

    Elements missing from one list sit at rank k+1 there. For equal-length
    lists this equals the algebraic expansion
    2(k-z)(k+1) + sum_Z |r1-r2| - sum_S r1 - sum_T r2.
    """
    if k < 1:
        raise MetricsError("k must be >= 1")
    top1 = list(l1[:k])
    top2 = list(l2[:k])
    _check_unique(top1, "first")
    _check_unique(top2, "second")
    r1 = {e: i + 1 for i, e in enumerate(top1)}
    r2 = {e: i + 1 for i, e in enumerate(top2)}
    z = set(r1) & set(r2)
    s = set(r1) - z
    t = set(r2) - z
    d = float(
        sum(abs(r1[e] - r2[e]) for e in z)
        + sum(k + 1 - r1[e] for e in s)
        + sum(k + 1 - r2[e] for e in t)
    )
    return d, FootruleParts(frozenset(z), frozenset(s), frozenset(t))


def max_footrule(k: int) -> float:
    """Distance between disjoint top-k lists: k(k+1)."""
    return float(k * (k + 1))


def f_measure(l1: RankedList, l2: RankedList, k: int) -> float:
    d, _ = footrule_distance(l1, l2, k)
    return 1.0 - d / max_footrule(k)


def g_measure(l1: RankedList, l2: RankedList, k: int) -> float:
    d, _ = footrule_distance(l1, l2, k)
    return d / max_footrule(k)


def max_m_prime(len1: int, len2: int) -> float:
    """M' of fully disjoint lists of the given lengths (4.03975 at 10,10)."""
    return sum(1.0 / i - 1.0 / (len1 + 1) for i in range(1, len1 + 1)) + sum(
        1.0 / i - 1.0 / (len2 + 1) for i in range(1, len2 + 1)
    )


def _m_prime_raw(l1: RankedList, l2: RankedList) -> float:
    r1 = {e: i + 1 for i, e in enumerate(l1)}
    r2 = {e: i + 1 for i, e in enumerate(l2)}
    z = set(r1) & set(r2)
    len1, len2 = len(l1), len(l2)
    return (
        sum(abs(1.0 / r1[e] - 1.0 / r2[e]) for e in z)
        + sum(1.0 / r1[e] - 1.0 / (len1 + 1) for e in set(r1) - z)
        + sum(1.0 / r2[e] - 1.0 / (len2 + 1) for e in set(r2) - z)
    )


def m_measure(l1: RankedList, l2: RankedList) -> tuple[float, float]:
    """(M', M): reciprocal-rank disagreement and its [0,1] normalization."""
    if not l1 or not l2:
        raise MetricsError("m_measure needs non-empty lists")
    _check_unique(l1, "first")
    _check_unique(l2, "second")
    m_prime = _m_prime_raw(l1, l2)
    return m_prime, 1.0 - m_prime / max_m_prime(len(l1), len(l2))


def overlap_bucket(overlap_fraction: float) -> int:
    """Five equal intervals in decreasing order: 1 is (0.8,1.0] ... 5 is [0,0.2]."""
    if not 0.0 <= overlap_fraction <= 1.0:
        raise MetricsError("overlap fraction must be in [0,1]")
    for bucket, upper in enumerate((0.2, 0.4, 0.6, 0.8), start=1):
        if overlap_fraction <= upper:
            return 6 - bucket
    return 1


@dataclass(frozen=True)
class ListComparison:
    query_id: str
    k: int
    parts: FootruleParts
    d_footrule: float
    f: float
    g: float
    m_prime: float
    m: float

    @property
    def z(self) -> int:
        return len(self.parts.overlap)

    @property
    def overlap_fraction(self) -> float:
        return self.z / self.k

    @property
    def bucket(self) -> int:
        return overlap_bucket(self.overlap_fraction)


def compare_lists(query_id: str, l1: RankedList, l2: RankedList, k: int) -> ListComparison:
    d, parts = footrule_distance(l1, l2, k)
    f = 1.0 - d / max_footrule(k)
    top1, top2 = list(l1[:k]), list(l2[:k])
    if not top1 and not top2:
        m_prime, m = 0.0, 1.0  # two empty result lists do not disagree
    elif not top1 or not top2:
        m_prime = _m_prime_raw(top1, top2)
        m = 1.0 - m_prime / max_m_prime(len(top1), len(top2))
    else:
        m_prime, m = m_measure(top1, top2)
    return ListComparison(
        query_id=query_id,
        k=k,
        parts=parts,
        d_footrule=d,
        f=f,
        g=1.0 - f,
        m_prime=m_prime,
        m=m,
    )


@dataclass
class BucketSummary:
    count: int = 0
    f_values: list[float] = field(default_factory=list)
    g_values: list[float] = field(default_factory=list)
    m_values: list[float] = field(default_factory=list)

    def mean(self, values: list[float]) -> Optional[float]:
        return sum(values) / len(values) if values else None

    def median(self, values: list[float]) -> Optional[float]:
        if not values:
            return None
        ordered = sorted(values)
        mid = len(ordered) // 2
        if len(ordered) % 2:
            return ordered[mid]
        return (ordered[mid - 1] + ordered[mid]) / 2


def compare_pairs(
    run_a: dict[str, RankedList],
    run_b: dict[str, RankedList],
    k: int = 10,
) -> tuple[list[ListComparison], dict[int, BucketSummary]]:
    """Per-query comparisons plus per-bucket aggregation of F/G/M."""
    shared = sorted(set(run_a) & set(run_b))
    if not shared:
        raise MetricsError("runs share no queries")
    comparisons = [compare_lists(qid, run_a[qid], run_b[qid], k) for qid in shared]
    buckets: dict[int, BucketSummary] = {b: BucketSummary() for b in range(1, 6)}
    for comp in comparisons:
        summary = buckets[comp.bucket]
        summary.count += 1
        summary.f_values.append(comp.f)
        summary.g_values.append(comp.g)
        summary.m_values.append(comp.m)
    return comparisons, buckets


def write_run(run: dict[str, RankedList], fh: TextIO) -> None:
    for qid in sorted(run):
        for rank, element in enumerate(run[qid], start=1):
            fh.write(f"{qid}\t{rank}\t{element}\n")


def read_run(fh: TextIO) -> dict[str, list[str]]:
    entries: dict[str, list[tuple[int, str]]] = {}
    for line_no, line in enumerate(fh, start=1):
        line = line.rstrip("\n")
        if not line:
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise MetricsError(f"run line {line_no}: expected query_id<TAB>rank<TAB>element")
        qid, rank_text, element = parts
        entries.setdefault(qid, []).append((int(rank_text), element))
    run: dict[str, list[str]] = {}
    for qid, ranked in entries.items():
        ranked.sort()
        ranks = [r for r, _ in ranked]
        if ranks != list(range(1, len(ranks) + 1)):
            raise MetricsError(f"query {qid}: ranks must be 1..n without gaps")
        run[qid] = [e for _, e in ranked]
    return run


def write_comparison_csv(comparisons: Iterable[ListComparison], fh: TextIO) -> None:
    writer = csv.writer(fh)
    writer.writerow(
        ["query_id", "z", "overlap_fraction", "bucket", "d_footrule", "F", "G", "M"]
    )
    for comp in comparisons:
        writer.writerow(
            [
                comp.query_id,
                comp.z,
                f"{comp.overlap_fraction:.6f}",
                comp.bucket,
                f"{comp.d_footrule:.6f}",
                f"{comp.f:.6f}",
                f"{comp.g:.6f}",
                f"{comp.m:.6f}",
            ]
        )
