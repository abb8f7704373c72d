"""Batch entry points: ingestion, training, sweeps, metrics, routing, serving."""
from __future__ import annotations

import csv
import hashlib
import json
import math
import sys
from dataclasses import dataclass
from typing import Optional, Sequence, TextIO

import click
import numpy as np

from . import classifier as clf
from . import corpus as corpus_mod
from . import evalmetrics as em
from . import routing as routing_mod
from .service import COMPARE_PAIRS, Engine, EngineConfig, load_config, create_app
from .textprep import default_lexicon, default_stoplist, lexicon_label, load_lexicon, load_stoplist, make_rake_tagger

_KNOWN_ERRORS = (
    corpus_mod.CorpusError,
    clf.ClassifierError,
    routing_mod.RoutingError,
    em.MetricsError,
    ValueError,
    OSError,
)


def content_hash(path: str) -> str:
    """Git-style blob hash of a file, for provenance lines in CSV outputs."""
    with open(path, "rb") as fh:
        data = fh.read()
    return hashlib.sha1(b"blob %d\0" % len(data) + data).hexdigest()


def _provenance(fh: TextIO, inputs: dict[str, str]) -> None:
    parts = " ".join(f"{name}={content_hash(path)}" for name, path in sorted(inputs.items()))
    fh.write(f"# inputs: {parts}\n")


def _fmt(value: Optional[float]) -> str:
    return "" if value is None else f"{value:.6f}"


@click.group()
def main() -> None:
    """Sentiment-aware place recommendation toolkit."""


def _run(func) -> None:
    try:
        func()
    except _KNOWN_ERRORS as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)


def _load_places(path: str, strict: bool) -> corpus_mod.IngestReport:
    with open(path, encoding="utf-8") as fh:
        return corpus_mod.ingest_places(fh, strict=strict)


def _tagger(stoplist_path: Optional[str], top_n: int):
    stoplist = load_stoplist(stoplist_path) if stoplist_path else default_stoplist()
    return make_rake_tagger(stoplist, top_n=top_n)


@main.command()
@click.argument("places_file", type=click.Path(exists=True))
@click.option("--out-transactions", required=True, type=click.Path())
@click.option("--out-dictionary", required=True, type=click.Path())
@click.option("--strict", is_flag=True, help="Abort on the first malformed record.")
@click.option("--top-n", default=10, show_default=True, help="Tags kept per review.")
@click.option("--stoplist", type=click.Path(exists=True), default=None)
def ingest(places_file, out_transactions, out_dictionary, strict, top_n, stoplist):
    """Turn a place JSONL file into transaction and dictionary files."""

    def body():
        report = _load_places(places_file, strict)
        built = corpus_mod.build_database(report.places, _tagger(stoplist, top_n))
        corpus_mod.write_transactions(built.db, out_transactions, out_dictionary)
        click.echo(
            f"ingested {len(report.places)} places -> {len(built.db)} transactions "
            f"({len(built.dropped)} dropped, {len(report.skipped)} malformed skipped)"
        )

    _run(body)


@main.command()
@click.argument("places_file", type=click.Path(exists=True))
@click.argument("out_model_dir", type=click.Path())
@click.option("--minsup", required=True, type=int, help="Minimum candidate support.")
@click.option("--bootstrap-lexicon", default=None,
              help="Lexicon file (or 'default') to label unlabeled places.")
@click.option("--top-n", default=10, show_default=True)
@click.option("--max-len", default=6, show_default=True)
@click.option("--stoplist", type=click.Path(exists=True), default=None)
def train(places_file, out_model_dir, minsup, bootstrap_lexicon, top_n, max_len, stoplist):
    """Train per-class code tables from labeled (or lexicon-labeled) places."""

    def body():
        report = _load_places(places_file, strict=False)
        places = report.places
        unlabeled = [p for p in places if p.sentiment is None]
        dropped_undecided = 0
        if unlabeled:
            if not bootstrap_lexicon:
                raise clf.ClassifierError(
                    f"{len(unlabeled)} unlabeled places; pass --bootstrap-lexicon to label them"
                )
            lexicon = (
                default_lexicon()
                if bootstrap_lexicon == "default"
                else load_lexicon(bootstrap_lexicon)
            )
            labeled = []
            for place in places:
                if place.sentiment is not None:
                    labeled.append(place)
                    continue
                label = lexicon_label(place.review, lexicon)
                if label is None:
                    dropped_undecided += 1
                else:
                    labeled.append(
                        corpus_mod.Place(
                            place.id, place.name, place.address, place.review,
                            place.lat, place.lon, label,
                        )
                    )
            places = labeled
        built = corpus_mod.build_database(places, _tagger(stoplist, top_n))
        model = clf.train(built.db, minsup=minsup, max_len=max_len)
        clf.save_model(model, out_model_dir)
        sizes = {label: len(model.tables[label]) for label in model.classes}
        click.echo(
            f"trained on {len(built.db)} transactions "
            f"(undecided dropped: {dropped_undecided}); table entries: {sizes}"
        )

    _run(body)


def _load_eval_db(data_file: str, dictionary: Optional[str], stoplist: Optional[str], top_n: int):
    if data_file.endswith(".jsonl"):
        report = _load_places(data_file, strict=False)
        return corpus_mod.build_database(report.places, _tagger(stoplist, top_n)).db
    if not dictionary:
        raise corpus_mod.CorpusError("transaction input needs --dictionary")
    return corpus_mod.read_transactions(data_file, corpus_mod.read_dictionary(dictionary))


def _metric_row(pairs, positive_class):
    metrics = em.classification_metrics(pairs, positive_class)
    return {
        "n": metrics.counts.total,
        "accuracy": metrics.accuracy,
        "precision": metrics.precision,
        "recall": metrics.recall,
        "f1": metrics.f1,
        "tnr": metrics.tnr,
        "ppcr": metrics.ppcr,
        "unclassifiable": metrics.counts.unclassifiable,
    }


@main.command()
@click.argument("model_dir", type=click.Path(exists=True))
@click.argument("eval_file", type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path())
@click.option("--deltas", default="0,0.25,0.33,0.50,0.67", show_default=True)
@click.option("--seeds", default="0", show_default=True)
@click.option("--cv-folds", default="1", show_default=True,
              help="Comma list from {1,2,5,10}.")
@click.option("--split", default=0.8, show_default=True, help="Seen fraction.")
@click.option("--minsup", type=int, default=None, help="Defaults to the model's minsup.")
@click.option("--dictionary", type=click.Path(exists=True), default=None)
@click.option("--stoplist", type=click.Path(exists=True), default=None)
@click.option("--top-n", default=10, show_default=True)
@click.option("--positive-class", default=corpus_mod.POSITIVE, show_default=True)
def sweep(model_dir, eval_file, out, deltas, seeds, cv_folds, split, minsup,
          dictionary, stoplist, top_n, positive_class):
    """Degeneration sweep: accuracy per (delta, seed, cv_fold, seen|unseen).

    The labeled data splits 80:20 into seen/unseen per seed. CV=1 trains on
    the whole seen split (its seen rows are resubstitution); CV=f trains f
    fold models on f-1 folds each, testing on the held fold and on the
    unseen split, pairs pooled across folds.
    """

    def body():
        base = clf.load_model(model_dir)
        use_minsup = minsup if minsup is not None else base.minsup
        db = _load_eval_db(eval_file, dictionary, stoplist, top_n)
        if not db.is_fully_labeled():
            raise clf.ClassifierError("sweep needs fully labeled evaluation data")
        if not 0.0 < split < 1.0:
            raise clf.ClassifierError("split must be in (0,1)")
        delta_list = [float(x) for x in deltas.split(",") if x]
        seed_list = [int(x) for x in seeds.split(",") if x]
        fold_list = [int(x) for x in cv_folds.split(",") if x]
        for f in fold_list:
            if f not in (1, 2, 5, 10):
                raise clf.ClassifierError(f"cv fold count {f} not in {{1,2,5,10}}")
        rows = []
        for seed in seed_list:
            rng = np.random.default_rng(seed)
            order = rng.permutation(len(db))
            n_seen = max(2, int(round(split * len(db))))
            seen_idx, unseen_idx = order[:n_seen], order[n_seen:]
            for n_folds in fold_list:
                fold_models = []
                if n_folds == 1:
                    fold_models.append((_subset(db, seen_idx), None))
                else:
                    chunks = np.array_split(seen_idx, n_folds)
                    for held in range(n_folds):
                        train_idx = np.concatenate(
                            [chunks[i] for i in range(n_folds) if i != held]
                        )
                        fold_models.append((_subset(db, train_idx), chunks[held]))
                trained = []
                for train_db, held_idx in fold_models:
                    model = clf.train(train_db, minsup=use_minsup)
                    trained.append((model, train_db, held_idx))
                for delta in delta_list:
                    seen_pairs, unseen_pairs = [], []
                    for model, train_db, held_idx in trained:
                        seen_db = train_db if held_idx is None else _subset(db, held_idx)
                        result = clf.truncate_classification(seen_db, delta, seed, model)
                        seen_pairs.extend(result.pairs)
                        if len(unseen_idx):
                            result = clf.truncate_classification(
                                _subset(db, unseen_idx), delta, seed, model
                            )
                            unseen_pairs.extend(result.pairs)
                    for eval_type, pairs in (("seen", seen_pairs), ("unseen", unseen_pairs)):
                        if not pairs:
                            continue
                        row = {
                            "delta": delta,
                            "seed": seed,
                            "cv_folds": n_folds,
                            "eval_type": eval_type,
                            "resubstitution": eval_type == "seen" and n_folds == 1,
                        }
                        row.update(_metric_row(pairs, positive_class))
                        rows.append(row)
        header = ["delta", "seed", "cv_folds", "eval_type", "resubstitution", "n",
                  "accuracy", "precision", "recall", "f1", "tnr", "ppcr", "unclassifiable"]
        with open(out, "w", newline="", encoding="utf-8") as fh:
            _provenance(fh, {"eval_file": eval_file})
            writer = csv.writer(fh)
            writer.writerow(header)
            for row in rows:
                writer.writerow(
                    [
                        f"{row['delta']:g}", row["seed"], row["cv_folds"],
                        row["eval_type"], str(row["resubstitution"]).lower(), row["n"],
                        _fmt(row["accuracy"]), _fmt(row["precision"]), _fmt(row["recall"]),
                        _fmt(row["f1"]), _fmt(row["tnr"]), _fmt(row["ppcr"]),
                        row["unclassifiable"],
                    ]
                )
        click.echo(f"wrote {len(rows)} sweep rows to {out}")

    _run(body)


def _subset(db: corpus_mod.LabeledDatabase, indices) -> corpus_mod.LabeledDatabase:
    return corpus_mod.LabeledDatabase(
        [db.transactions[i] for i in indices],
        [db.labels[i] for i in indices],
        db.dictionary,
    )


@main.command()
@click.argument("model_dir", type=click.Path(exists=True))
@click.argument("data_file", type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path())
@click.option("--dictionary", type=click.Path(exists=True), default=None)
@click.option("--stoplist", type=click.Path(exists=True), default=None)
@click.option("--top-n", default=10, show_default=True)
def classify(model_dir, data_file, out, dictionary, stoplist, top_n):
    """Classify transactions (or places) and write per-item predictions."""

    def body():
        model = clf.load_model(model_dir)
        db = _load_eval_db(data_file, dictionary, stoplist, top_n)
        winners = clf.classify_batch(db.transactions, model)
        with open(out, "w", newline="", encoding="utf-8") as fh:
            _provenance(fh, {"data_file": data_file})
            writer = csv.writer(fh)
            writer.writerow(["index", "truth", "prediction"])
            for idx, (truth, pred) in enumerate(zip(db.labels, winners)):
                writer.writerow([idx, truth or "", pred or ""])
        n_ok = sum(1 for t, p in zip(db.labels, winners) if t is not None and t == p)
        click.echo(f"classified {len(db)} transactions ({n_ok} match their labels)")

    _run(body)


@main.command()
@click.argument("transactions_file", type=click.Path(exists=True))
@click.option("--dictionary", required=True, type=click.Path(exists=True))
@click.option("--delta", required=True, type=float)
@click.option("--seed", required=True, type=int)
@click.option("--out", required=True, type=click.Path())
def degrade(transactions_file, dictionary, delta, seed, out):
    """Write a degenerated copy of a transaction file."""

    def body():
        dict_ = corpus_mod.read_dictionary(dictionary)
        db = corpus_mod.read_transactions(transactions_file, dict_)
        corpus_mod.write_transactions(corpus_mod.degrade(db, delta, seed), out)
        click.echo(f"degraded {len(db)} transactions at delta={delta:g} -> {out}")

    _run(body)


@main.command()
@click.argument("model_dir", type=click.Path(exists=True))
@click.argument("data_file", type=click.Path(exists=True))
@click.option("--class-a", required=True, help="Reference class (its lengths subtract).")
@click.option("--class-b", required=True, help="Compared class.")
@click.option("--bin-width", default=50.0, show_default=True)
@click.option("--out", required=True, type=click.Path())
@click.option("--dictionary", type=click.Path(exists=True), default=None)
@click.option("--stoplist", type=click.Path(exists=True), default=None)
@click.option("--top-n", default=10, show_default=True)
def histogram(model_dir, data_file, class_a, class_b, bin_width, out,
              dictionary, stoplist, top_n):
    """Code-length-difference histogram (class_b length - class_a length)."""

    def body():
        model = clf.load_model(model_dir)
        for label in (class_a, class_b):
            if label not in model.tables:
                raise clf.ClassifierError(f"model has no class {label!r}")
        db = _load_eval_db(data_file, dictionary, stoplist, top_n)
        hist = clf.dissimilarity_histogram(
            db, model.tables[class_a], model.tables[class_b], model, bin_width=bin_width
        )
        with open(out, "w", newline="", encoding="utf-8") as fh:
            _provenance(fh, {"data_file": data_file})
            writer = csv.writer(fh)
            writer.writerow(["bin_lo_bits", "bin_hi_bits", "count"])
            for bucket in sorted(hist.counts):
                writer.writerow(
                    [f"{bucket * bin_width:g}", f"{(bucket + 1) * bin_width:g}",
                     hist.counts[bucket]]
                )
            if hist.neg_inf:
                writer.writerow(["-inf", "-inf", hist.neg_inf])
            if hist.pos_inf:
                writer.writerow(["inf", "inf", hist.pos_inf])
            if hist.undefined:
                writer.writerow(["undefined", "undefined", hist.undefined])
        click.echo(f"histogram of {hist.total()} transactions -> {out}")

    _run(body)


def read_queries(path: str) -> list[tuple[str, str, float, float]]:
    """Query batch lines: query_id<TAB>lat<TAB>lon<TAB>query text."""
    queries = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 4:
                raise ValueError(f"queries line {line_no}: expected qid<TAB>lat<TAB>lon<TAB>text")
            qid, lat, lon, text = parts
            queries.append((qid, text, float(lat), float(lon)))
    return queries


@main.command("compare-routing")
@click.argument("graph_file", type=click.Path(exists=True))
@click.argument("places_file", type=click.Path(exists=True))
@click.argument("queries_file", type=click.Path(exists=True))
@click.option("--k", default=10, show_default=True, help="Compared prefix length.")
@click.option("--out-dir", required=True, type=click.Path())
@click.option("--radius-m", default=5000.0, show_default=True)
@click.option("--model", "model_dir", type=click.Path(exists=True), default=None)
def compare_routing(graph_file, places_file, queries_file, k, out_dir, radius_m, model_dir):
    """Run the four routing variants and emit the six pair comparisons."""

    def body():
        import os

        config = EngineConfig(
            graph_path=graph_file, places_path=places_file,
            model_path=model_dir, radius_m=radius_m,
        )
        engine = Engine.load(config)
        queries = read_queries(queries_file)
        results = engine.compare_runs(queries, k=k)
        os.makedirs(out_dir, exist_ok=True)
        inputs = {"graph": graph_file, "places": places_file, "queries": queries_file}
        summary_path = os.path.join(out_dir, "bucket_summary.csv")
        with open(summary_path, "w", newline="", encoding="utf-8") as sfh:
            _provenance(sfh, inputs)
            summary = csv.writer(sfh)
            summary.writerow(["pair", "first", "second", "bucket", "count",
                              "mean_F", "mean_G", "mean_M"])
            for pair in sorted(results):
                comparisons, buckets = results[pair]
                path = os.path.join(out_dir, f"pair_{pair}.csv")
                with open(path, "w", newline="", encoding="utf-8") as fh:
                    _provenance(fh, inputs)
                    em.write_comparison_csv(comparisons, fh)
                first, second = COMPARE_PAIRS[pair]
                for bucket in range(1, 6):
                    b = buckets[bucket]
                    summary.writerow(
                        [pair, first, second, bucket, b.count,
                         _fmt(b.mean(b.f_values)), _fmt(b.mean(b.g_values)),
                         _fmt(b.mean(b.m_values))]
                    )
        click.echo(f"wrote 6 pair tables and {summary_path}")

    _run(body)


@main.command()
@click.argument("graph_file", type=click.Path(exists=True))
@click.argument("places_file", type=click.Path(exists=True))
@click.option("--from-lat", required=True, type=float)
@click.option("--from-lon", required=True, type=float)
@click.option("--place-id", required=True)
@click.option("--algo", default="dijkstra", show_default=True)
@click.option("--k", default=3, show_default=True)
def route(graph_file, places_file, from_lat, from_lon, place_id, algo, k):
    """Print route polylines to one place as JSON."""

    def body():
        config = EngineConfig(graph_path=graph_file, places_path=places_file)
        engine = Engine.load(config)
        routes = engine.route(from_lat, from_lon, place_id, algorithm=algo, k=k)
        click.echo(json.dumps({"routes": routes, "unreachable": not routes}, indent=2))

    _run(body)


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--graph", "graph_path", type=click.Path(exists=True), default=None)
@click.option("--places", "places_path", type=click.Path(exists=True), default=None)
@click.option("--model", "model_path", type=click.Path(exists=True), default=None)
@click.option("--port", type=int, default=None)
@click.option("--radius-m", type=float, default=None)
@click.option("--algo", "routing_algorithm", default=None)
@click.option("--no-boosts", "boosts_disabled", is_flag=True)
@click.option("--limit", "result_limit", type=int, default=None)
def serve(config_path, graph_path, places_path, model_path, port, radius_m,
          routing_algorithm, boosts_disabled, result_limit):
    """Run the HTTP service."""

    def body():
        import uvicorn

        config = load_config(
            config_path,
            graph_path=graph_path,
            places_path=places_path,
            model_path=model_path,
            port=port,
            radius_m=radius_m,
            routing_algorithm=routing_algorithm,
            boosts_enabled=False if boosts_disabled else None,
            result_limit=result_limit,
        )
        engine = Engine.load(config)
        uvicorn.run(create_app(engine, config), host="0.0.0.0", port=config.port)

    _run(body)


if __name__ == "__main__":
    main()
