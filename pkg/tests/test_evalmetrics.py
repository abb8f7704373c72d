import io
import itertools
import math
import random

import pytest

from routerec.evalmetrics import (
    BucketSummary,
    MetricsError,
    classification_metrics,
    compare_lists,
    compare_pairs,
    f_measure,
    footrule_distance,
    g_measure,
    m_measure,
    max_footrule,
    max_m_prime,
    overlap_bucket,
    read_run,
    write_comparison_csv,
    write_run,
)


class TestClassificationMetrics:
    def test_all_correct_positive(self):
        pairs = [("pos", "pos")] * 5
        m = classification_metrics(pairs, "pos")
        assert m.precision == m.recall == m.accuracy == m.ppcr == 1.0

    def test_degenerate_all_positive_classifier(self):
        # 85%-positive truth, everything predicted positive
        pairs = [("pos", "pos")] * 85 + [("neg", "pos")] * 15
        m = classification_metrics(pairs, "pos")
        assert m.accuracy == pytest.approx(0.85)
        assert m.recall == 1.0
        assert m.tnr == 0.0
        assert m.ppcr == 1.0
        assert m.precision == pytest.approx(0.85)

    def test_ppcr_ratio(self):
        pairs = [("pos", "pos")] * 7 + [("pos", "neg")] * 3
        assert classification_metrics(pairs, "pos").ppcr == pytest.approx(0.7)

    def test_undefined_ratios_are_none(self):
        pairs = [("neg", "neg")] * 4
        m = classification_metrics(pairs, "pos")
        assert m.precision is None
        assert m.recall is None
        assert m.tnr == 1.0

    def test_unclassifiable_counted(self):
        pairs = [("pos", "pos"), ("pos", None), ("neg", None)]
        m = classification_metrics(pairs, "pos")
        assert m.counts.unclassifiable == 2
        assert m.counts.total == 3
        assert m.accuracy == 1.0

    def test_empty_is_error(self):
        with pytest.raises(MetricsError):
            classification_metrics([], "pos")


def ranked(letters):
    return list(letters)


class TestFootrule:
    def test_identical(self):
        d, parts = footrule_distance(ranked("abc"), ranked("abc"), 3)
        assert d == 0.0
        assert parts.overlap == frozenset("abc")

    def test_disjoint_top10(self):
        l1 = [f"a{i}" for i in range(10)]
        l2 = [f"b{i}" for i in range(10)]
        d, _ = footrule_distance(l1, l2, 10)
        assert d == 110.0
        assert d == max_footrule(10)

    def test_reversed_top3(self):
        d, _ = footrule_distance(ranked("abc"), ranked("cba"), 3)
        assert d == 4.0

    def test_duplicates_error(self):
        with pytest.raises(MetricsError, match="duplicate"):
            footrule_distance(["a", "a"], ["b", "c"], 2)

    def test_equals_eq3_algebra_exhaustively(self):
        # all pairs of equal-length lists up to length 5 over a 5-element
        # universe: the implemented placement distance must equal
        # 2(k-z)(k+1) + sum_Z |r1-r2| - sum_S r1 - sum_T r2
        universe = "abcde"
        for k in range(1, 6):
            for l1 in itertools.permutations(universe, k):
                for l2 in itertools.permutations(universe, k):
                    d, parts = footrule_distance(l1, l2, k)
                    r1 = {e: i + 1 for i, e in enumerate(l1)}
                    r2 = {e: i + 1 for i, e in enumerate(l2)}
                    z = parts.overlap
                    algebraic = (
                        2 * (k - len(z)) * (k + 1)
                        + sum(abs(r1[e] - r2[e]) for e in z)
                        - sum(r1[e] for e in parts.first_only)
                        - sum(r2[e] for e in parts.second_only)
                    )
                    assert d == algebraic


class TestFG:
    def test_identical(self):
        assert f_measure(ranked("abc"), ranked("abc"), 3) == 1.0
        assert g_measure(ranked("abc"), ranked("abc"), 3) == 0.0

    def test_disjoint(self):
        l1 = [f"a{i}" for i in range(10)]
        l2 = [f"b{i}" for i in range(10)]
        assert f_measure(l1, l2, 10) == 0.0
        assert g_measure(l1, l2, 10) == 1.0

    def test_reversed_top3(self):
        f = f_measure(ranked("abc"), ranked("cba"), 3)
        assert f == pytest.approx(2 / 3)
        assert g_measure(ranked("abc"), ranked("cba"), 3) == pytest.approx(1 / 3)

    def test_f_plus_g_is_one_on_random_pairs(self):
        rng = random.Random(2)
        pool = [f"e{i}" for i in range(30)]
        for _ in range(1000):
            k = rng.randint(1, 10)
            l1 = rng.sample(pool, k)
            l2 = rng.sample(pool, k)
            assert f_measure(l1, l2, k) + g_measure(l1, l2, k) == pytest.approx(1.0)

    def test_symmetry(self):
        rng = random.Random(3)
        pool = [f"e{i}" for i in range(15)]
        for _ in range(100):
            l1 = rng.sample(pool, 6)
            l2 = rng.sample(pool, 6)
            assert f_measure(l1, l2, 6) == pytest.approx(f_measure(l2, l1, 6))


class TestM:
    def test_identical(self):
        m_prime, m = m_measure(ranked("abc"), ranked("abc"))
        assert m_prime == 0.0
        assert m == 1.0

    def test_paper_constant(self):
        # harmonic-sum oracle: 2*(H_10 - 10/11)
        h10 = sum(1.0 / i for i in range(1, 11))
        assert max_m_prime(10, 10) == pytest.approx(2 * (h10 - 10 / 11), abs=1e-12)
        assert max_m_prime(10, 10) == pytest.approx(4.03975, abs=5e-6)

    def test_disjoint_top10(self):
        l1 = [f"a{i}" for i in range(10)]
        l2 = [f"b{i}" for i in range(10)]
        m_prime, m = m_measure(l1, l2)
        assert m_prime == pytest.approx(max_m_prime(10, 10))
        assert m == pytest.approx(0.0, abs=1e-9)

    def test_symmetry(self):
        rng = random.Random(4)
        pool = [f"e{i}" for i in range(20)]
        for _ in range(200):
            l1 = rng.sample(pool, rng.randint(1, 10))
            l2 = rng.sample(pool, rng.randint(1, 10))
            mp12, m12 = m_measure(l1, l2)
            mp21, m21 = m_measure(l2, l1)
            assert mp12 == pytest.approx(mp21)
            assert m12 == pytest.approx(m21)

    def test_range_on_equal_length_lists(self):
        # the disjoint-case normalizer bounds M' only for equal lengths;
        # the comparison harness always compares same-k truncations
        rng = random.Random(5)
        pool = [f"e{i}" for i in range(20)]
        for _ in range(300):
            n = rng.randint(1, 10)
            l1 = rng.sample(pool, n)
            l2 = rng.sample(pool, n)
            _, m = m_measure(l1, l2)
            assert -1e-9 <= m <= 1 + 1e-9

    def test_empty_error(self):
        with pytest.raises(MetricsError):
            m_measure([], ["a"])


class TestBuckets:
    @pytest.mark.parametrize(
        "fraction,bucket",
        [
            (1.0, 1), (0.81, 1),
            (0.8, 2), (0.7, 2), (0.61, 2),
            (0.6, 3), (0.41, 3),
            (0.4, 4), (0.21, 4),
            (0.2, 5), (0.1, 5), (0.0, 5),
        ],
    )
    def test_boundaries(self, fraction, bucket):
        assert overlap_bucket(fraction) == bucket

    def test_out_of_range(self):
        with pytest.raises(MetricsError):
            overlap_bucket(1.2)


class TestComparePairs:
    def make_runs(self, n_queries=12, seed=0):
        rng = random.Random(seed)
        pool = [f"p{i}" for i in range(25)]
        run_a = {}
        run_b = {}
        for i in range(n_queries):
            qid = f"q{i:02d}"
            run_a[qid] = rng.sample(pool, 10)
            run_b[qid] = rng.sample(pool, 10)
        return run_a, run_b

    def test_self_comparison(self):
        run, _ = self.make_runs()
        comparisons, buckets = compare_pairs(run, run, k=10)
        for comp in comparisons:
            assert comp.f == 1.0
            assert comp.g == 0.0
            assert comp.m == 1.0
            assert comp.bucket == 1
        assert buckets[1].count == len(run)

    def test_counts_partition_queries(self):
        run_a, run_b = self.make_runs()
        comparisons, buckets = compare_pairs(run_a, run_b, k=10)
        assert len(comparisons) == 12
        assert sum(b.count for b in buckets.values()) == 12

    def test_disjoint_query_sets_error(self):
        with pytest.raises(MetricsError, match="share no queries"):
            compare_pairs({"a": ["x"]}, {"b": ["x"]}, k=1)

    def test_bucket_summary_stats(self):
        summary = BucketSummary()
        summary.f_values = [0.2, 0.4, 0.9]
        assert summary.mean(summary.f_values) == pytest.approx(0.5)
        assert summary.median(summary.f_values) == pytest.approx(0.4)

    def test_f_plus_g_per_comparison(self):
        run_a, run_b = self.make_runs(seed=9)
        comparisons, _ = compare_pairs(run_a, run_b, k=10)
        for comp in comparisons:
            assert comp.f + comp.g == pytest.approx(1.0)


class TestRunFiles:
    def test_round_trip(self):
        run = {"q1": ["a", "b", "c"], "q2": ["c", "a"]}
        buf = io.StringIO()
        write_run(run, buf)
        assert read_run(io.StringIO(buf.getvalue())) == run

    def test_bad_ranks_detected(self):
        with pytest.raises(MetricsError, match="ranks"):
            read_run(io.StringIO("q1\t1\ta\nq1\t3\tb\n"))

    def test_comparison_csv_columns(self):
        comp = compare_lists("q1", ["a", "b"], ["b", "a"], 2)
        buf = io.StringIO()
        write_comparison_csv([comp], buf)
        header = buf.getvalue().splitlines()[0]
        assert header == "query_id,z,overlap_fraction,bucket,d_footrule,F,G,M"
