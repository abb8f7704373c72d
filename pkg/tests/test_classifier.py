import io
import math

import pytest

from routerec.classifier import (
    Classification,
    ClassifierError,
    classify,
    classify_batch,
    dissimilarity_histogram,
    encode_length,
    laplace_code_bits,
    load_model,
    model_from_tables,
    save_model,
    train,
    truncate_classification,
)
from routerec.corpus import NEGATIVE, POSITIVE
from routerec.krimp import CodeTable, CodeTableEntry, read_code_table

from conftest import db_from_terms, planted_db, split_db

FIG5_CT_17073 = """CT 17073 4
146 (1,1)
477 (4,4)
488 (1,1)
7623 (1,1)
"""
FIG5_CT_17074 = """CT 17074 4
146 (0,0)
477 (0,0)
488 (1,1)
7623 (0,0)
"""


def fig5_model():
    l1, t1 = read_code_table(io.StringIO(FIG5_CT_17073))
    l2, t2 = read_code_table(io.StringIO(FIG5_CT_17074))
    return model_from_tables({l1: t1, l2: t2})


def mini_planted_model(minsup=2):
    db = db_from_terms(
        [["a", "b"]] * 10 + [["c", "d"]] * 10,
        [POSITIVE] * 10 + [NEGATIVE] * 10,
    )
    return train(db, minsup=minsup), db


class TestTrain:
    def test_planted_patterns_land_in_their_tables(self):
        model, db = mini_planted_model()
        a, b = db.dictionary.id_of("a"), db.dictionary.id_of("b")
        c, d = db.dictionary.id_of("c"), db.dictionary.id_of("d")
        pos_items = [e.items for e in model.tables[POSITIVE].entries]
        neg_items = [e.items for e in model.tables[NEGATIVE].entries]
        assert tuple(sorted((a, b))) in pos_items
        assert tuple(sorted((c, d))) in neg_items

    def test_alphabet_extension_zero_usage_singletons(self):
        model, db = mini_planted_model()
        c = db.dictionary.id_of("c")
        entry = model.tables[POSITIVE].singletons()[c]
        assert entry.usage == 0
        assert entry.support == 0

    def test_single_class_is_error(self):
        db = db_from_terms([["a"]] * 3, [POSITIVE] * 3)
        with pytest.raises(ClassifierError, match=">= 2 classes"):
            train(db, minsup=1)

    def test_fully_labeled_required(self):
        db = db_from_terms([["a"], ["b"]], [POSITIVE, None])
        with pytest.raises(Exception):
            train(db, minsup=1)


class TestEncodeLength:
    def test_laplace_single(self):
        model, db = mini_planted_model()
        ct = CodeTable(
            [CodeTableEntry((0,), 1, 1), CodeTableEntry((1,), 1, 1)]
        )
        toy = model_from_tables({"x": ct, "y": ct})
        assert encode_length((0,), ct, toy) == pytest.approx(1.0)
        assert encode_length((0, 1), ct, toy) == pytest.approx(2.0)

    def test_unknown_tag_dropped(self):
        ct = CodeTable([CodeTableEntry((0,), 1, 1), CodeTableEntry((1,), 1, 1)])
        toy = model_from_tables({"x": ct, "y": ct})
        assert encode_length((0, 99), ct, toy) == encode_length((0,), ct, toy)

    def test_fully_oov_is_error(self):
        ct = CodeTable([CodeTableEntry((0,), 1, 1)])
        toy = model_from_tables({"x": ct, "y": ct})
        with pytest.raises(ClassifierError, match="out-of-vocabulary"):
            encode_length((99,), ct, toy)

    def test_unseen_support_zero_prices_infinite(self):
        model = fig5_model()
        assert math.isinf(encode_length((146,), model.tables["17074"], model))


class TestClassify:
    def test_fig5_replay_winner_17073(self):
        model = fig5_model()
        result = classify((146, 477, 488, 7623), model)
        assert result.winner == "17073"
        # hand arithmetic: laplace usages (2,5,2,2)/11
        expected = 3 * math.log2(11 / 2) + math.log2(11 / 5)
        assert result.lengths["17073"] == pytest.approx(expected)
        assert math.isinf(result.lengths["17074"])

    def test_symmetric_tie_breaks_lexicographically(self):
        ct = CodeTable([CodeTableEntry((0,), 2, 2), CodeTableEntry((1,), 2, 2)])
        ct2 = CodeTable([CodeTableEntry((0,), 2, 2), CodeTableEntry((1,), 2, 2)])
        model = model_from_tables({"b": ct, "a": ct2})
        assert classify((0, 1), model).winner == "a"

    def test_planted_transaction_prefers_its_class(self):
        model, db = mini_planted_model()
        t = db.transactions[0]  # an {a,b} transaction
        result = classify(t, model)
        assert result.winner == POSITIVE
        assert result.lengths[POSITIVE] < result.lengths[NEGATIVE]

    def test_winner_attains_minimum(self):
        model, db = mini_planted_model()
        for t in db.transactions[::3]:
            result = classify(t, model)
            assert result.lengths[result.winner] == min(result.lengths.values())

    def test_unclassifiable_when_no_class_can_encode(self):
        ct1 = CodeTable([CodeTableEntry((0,), 1, 1), CodeTableEntry((1,), 0, 0)])
        ct2 = CodeTable([CodeTableEntry((0,), 0, 0), CodeTableEntry((1,), 1, 1)])
        model = model_from_tables({"x": ct1, "y": ct2})
        with pytest.raises(ClassifierError, match="unclassifiable"):
            classify((0, 1), model)

    def test_batch_agrees_with_single(self, planted):
        model = train(planted, minsup=3)
        winners = classify_batch(planted.transactions[:60], model)
        for t, winner in zip(planted.transactions[:60], winners):
            assert winner == classify(t, model).winner

    def test_uniform_smoothing_extension_preserves_argmin(self):
        model, db = mini_planted_model()
        before = [classify(t, model).winner for t in db.transactions]
        spare = db.dictionary.intern("unused-filler")
        new_key = db.dictionary.lex_ranks()
        rebuilt = {}
        for label, table in model.tables.items():
            extended_table = CodeTable(table.entries, order_key=new_key)
            extended_table.insert(CodeTableEntry((spare,), usage=0, support=1))
            rebuilt[label] = extended_table
        extended = model_from_tables(rebuilt)
        after = [classify(t, extended).winner for t in db.transactions]
        assert before == after


class TestTruncateClassification:
    def test_delta_zero_partition_matches_training_classes(self, planted):
        model = train(planted, minsup=3)
        result = truncate_classification(planted, 0.0, seed=1, model=model)
        sizes = {k: len(v) for k, v in result.partition.items()}
        want = {
            POSITIVE: planted.labels.count(POSITIVE),
            NEGATIVE: planted.labels.count(NEGATIVE),
        }
        assert sizes == want

    def test_partition_property(self, planted):
        model = train(planted, minsup=3)
        result = truncate_classification(planted, 0.5, seed=5, model=model)
        n_in_partition = sum(len(v) for v in result.partition.values())
        assert n_in_partition + len(result.unclassifiable) == len(planted)

    def test_deterministic(self, planted):
        model = train(planted, minsup=3)
        one = truncate_classification(planted, 0.33, seed=9, model=model)
        two = truncate_classification(planted, 0.33, seed=9, model=model)
        assert one.partition == two.partition
        assert one.pairs == two.pairs


class TestDissimilarityHistogram:
    def test_identical_tables_single_zero_bin(self):
        model, db = mini_planted_model()
        table = model.tables[POSITIVE]
        pos_db = db_from_terms([["a", "b"]] * 10, dictionary=db.dictionary)
        hist = dissimilarity_histogram(pos_db, table, table, model, bin_width=50.0)
        assert hist.counts == {0: len(pos_db)}
        assert hist.pos_inf == hist.neg_inf == hist.undefined == 0

    def test_planted_positive_mass(self, planted):
        model = train(planted, minsup=3)
        pos_txns = [
            t for t, l in zip(planted.transactions, planted.labels) if l == POSITIVE
        ]
        pos_db = db_from_terms([], dictionary=planted.dictionary)
        pos_db.transactions = pos_txns
        pos_db.labels = [None] * len(pos_txns)
        hist = dissimilarity_histogram(
            pos_db, model.tables[POSITIVE], model.tables[NEGATIVE], model, bin_width=1.0
        )
        finite_negative = sum(c for b, c in hist.counts.items() if b < 0)
        assert finite_negative == 0
        assert hist.neg_inf == 0
        assert hist.pos_inf + sum(
            c for b, c in hist.counts.items() if b >= 0
        ) == len(pos_txns)

    def test_conservation(self, planted):
        model = train(planted, minsup=3)
        hist = dissimilarity_histogram(
            planted, model.tables[POSITIVE], model.tables[NEGATIVE], model
        )
        assert hist.total() == len(planted)


class TestModelIO:
    def test_round_trip_preserves_classification(self, tmp_path, planted):
        model = train(planted, minsup=3)
        save_model(model, str(tmp_path / "model"))
        loaded = load_model(str(tmp_path / "model"))
        assert loaded.classes == model.classes
        assert loaded.minsup == model.minsup
        for t in planted.transactions[:40]:
            a = classify(t, model)
            b = classify(t, loaded)
            assert a.winner == b.winner
            for label in a.lengths:
                assert a.lengths[label] == pytest.approx(b.lengths[label])

    def test_tampering_detected(self, tmp_path, planted):
        model = train(planted, minsup=3)
        directory = tmp_path / "model"
        save_model(model, str(directory))
        ct_files = sorted(directory.glob("ct_*.txt"))
        ct_files[0].write_text(ct_files[0].read_text() + "\n")
        with pytest.raises(ClassifierError, match="hash"):
            load_model(str(directory))
