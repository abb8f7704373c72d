"""Shared fixtures: term databases, planted-pattern corpora, geo graphs."""
from __future__ import annotations

import math
import random

import numpy as np
import pytest

from routerec.corpus import NEGATIVE, POSITIVE, LabeledDatabase, TagDictionary
from routerec.routing import RoadGraph, haversine


def db_from_terms(term_lists, labels=None, dictionary=None) -> LabeledDatabase:
    """Build a LabeledDatabase from lists of term strings."""
    dictionary = dictionary or TagDictionary()
    transactions = []
    for terms in term_lists:
        ids = {dictionary.intern(t) for t in terms}
        transactions.append(dictionary.sort_tags(ids))
    labels = list(labels) if labels is not None else [None] * len(transactions)
    return LabeledDatabase(transactions, labels, dictionary)


POS_PATTERNS = [("posa", "posb", "posc"), ("posd", "pose", "posf")]
NEG_PATTERNS = [("nega", "negb", "negc"), ("negd", "nege", "negf")]
NOISE_VOCAB = [f"noise{i:02d}" for i in range(20)]


def planted_db(n_pos=300, n_neg=60, seed=7, noise_range=(2, 4)) -> LabeledDatabase:
    """Two-class corpus with class-exclusive co-occurring patterns.

    Each transaction carries one full class pattern plus shared noise tags,
    so the trained tables have a ground-truth signal and class skew mirrors
    a review corpus (many positive, few negative).
    """
    rng = random.Random(seed)
    term_lists = []
    labels = []
    for label, patterns, count in (
        (POSITIVE, POS_PATTERNS, n_pos),
        (NEGATIVE, NEG_PATTERNS, n_neg),
    ):
        for _ in range(count):
            pattern = patterns[rng.randrange(len(patterns))]
            n_noise = rng.randint(*noise_range)
            noise = rng.sample(NOISE_VOCAB, n_noise)
            term_lists.append(list(pattern) + noise)
            labels.append(label)
    order = list(range(len(term_lists)))
    rng.shuffle(order)
    return db_from_terms(
        [term_lists[i] for i in order], [labels[i] for i in order]
    )


@pytest.fixture(scope="session")
def planted():
    return planted_db()


def split_db(db: LabeledDatabase, fraction: float, seed: int):
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(db))
    n_seen = int(round(fraction * len(db)))
    seen, unseen = order[:n_seen], order[n_seen:]

    def subset(indices):
        return LabeledDatabase(
            [db.transactions[i] for i in indices],
            [db.labels[i] for i in indices],
            db.dictionary,
        )

    return subset(seen), subset(unseen)


def random_transactions(rng: random.Random, max_txns=200, max_tags=30):
    """Random small transaction database over integer-term tags."""
    n_tags = rng.randint(4, max_tags)
    n_txns = rng.randint(2, max_txns)
    terms = [f"t{i:02d}" for i in range(n_tags)]
    term_lists = []
    for _ in range(n_txns):
        size = rng.randint(1, min(8, n_tags))
        term_lists.append(rng.sample(terms, size))
    return db_from_terms(term_lists)


def random_geo_graph(rng: random.Random, n_nodes: int, stretch=(1.0, 1.6)) -> RoadGraph:
    """Connected random graph; edge lengths >= straight-line distance."""
    g = RoadGraph()
    coords = []
    for i in range(n_nodes):
        lat = 52.0 + rng.uniform(-0.05, 0.05)
        lon = 5.0 + rng.uniform(-0.05, 0.05)
        coords.append((lat, lon))
        g.add_node(i, lat, lon)

    def link(u, v):
        d = haversine(coords[u][0], coords[u][1], coords[v][0], coords[v][1])
        g.add_edge(u, v, max(1.0, d) * rng.uniform(*stretch))

    for i in range(1, n_nodes):
        link(i, rng.randrange(i))
    extra = rng.randint(0, n_nodes)
    for _ in range(extra):
        u, v = rng.randrange(n_nodes), rng.randrange(n_nodes)
        if u != v and all(n != v for n, _ in g.adjacency[u]):
            link(u, v)
    g.finalize()
    return g


def random_int_graph(rng: random.Random, n_nodes: int, connect_p=0.45) -> RoadGraph:
    """Small graph with integer edge lengths (exact float sums) for oracles."""
    g = RoadGraph()
    for i in range(n_nodes):
        g.add_node(i, 52.0 + i * 1e-6, 5.0)
    for u in range(n_nodes):
        for v in range(u + 1, n_nodes):
            if rng.random() < connect_p:
                g.add_edge(u, v, float(rng.randint(1, 20)))
    g.finalize()
    return g


def all_simple_paths(g: RoadGraph, start: int, goal: int):
    """Brute-force enumeration of every simple path with its cost."""
    paths = []

    def dfs(node, visited, path, cost):
        if node == goal:
            paths.append((cost, tuple(path)))
            return
        for neighbor, length in g.adjacency[node]:
            if neighbor not in visited:
                visited.add(neighbor)
                path.append(neighbor)
                dfs(neighbor, visited, path, cost + length)
                path.pop()
                visited.remove(neighbor)

    dfs(start, {start}, [start], 0.0)
    paths.sort(key=lambda item: (item[0], item[1]))
    return paths


# --- synthetic city fixture (graph + labeled places) -----------------------

CITY_ORIGIN = (52.00, 5.00)
CITY_ROWS = 5
CITY_COLS = 5
LAT_STEP = 0.004  # ~445 m
LON_STEP = 0.0065  # ~445 m at latitude 52


def city_node_coord(row: int, col: int) -> tuple[float, float]:
    return (CITY_ORIGIN[0] + row * LAT_STEP, CITY_ORIGIN[1] + col * LON_STEP)


def city_graph_text() -> str:
    lines = ["nodes:"]
    for r in range(CITY_ROWS):
        for c in range(CITY_COLS):
            lat, lon = city_node_coord(r, c)
            lines.append(f"{r * CITY_COLS + c} {lat:.6f} {lon:.6f}")
    lines.append("edges:")
    for r in range(CITY_ROWS):
        for c in range(CITY_COLS):
            node = r * CITY_COLS + c
            lat, lon = city_node_coord(r, c)
            for dr, dc in ((0, 1), (1, 0)):
                nr, nc = r + dr, c + dc
                if nr < CITY_ROWS and nc < CITY_COLS:
                    nlat, nlon = city_node_coord(nr, nc)
                    dist = haversine(lat, lon, nlat, nlon) * 1.2
                    lines.append(f"{node} {nr * CITY_COLS + nc} {dist:.2f}")
    return "\n".join(lines) + "\n"


CITY_PLACES = [
    # id, name, address, review, node (row, col), label
    # p01/p02 are token-parity twins apart from sentiment: same name/review
    # shape, "pizza" in the same fields, one grid step from node (0,0)
    ("p01", "Luigi Pizza", "12 Canal Street", "wonderful pizza and friendly staff", (0, 1), POSITIVE),
    ("p02", "Mario Pizza", "3 Harbor Road", "terrible pizza and rude staff", (1, 0), NEGATIVE),
    ("p03", "Canal Coffee Corner", "14 Canal Street", "great coffee and cozy seats", (0, 2), POSITIVE),
    ("p04", "Harbor Fish Bar", "8 Harbor Road", "fresh fish, worth the wait", (2, 0), POSITIVE),
    ("p05", "Station Sushi", "1 Station Square", "bland sushi and slow service", (2, 2), NEGATIVE),
    ("p06", "Green Garden Salads", "9 Park Lane", "fresh salads, generous portions", (3, 1), POSITIVE),
    ("p07", "Park Burger Joint", "11 Park Lane", "greasy burger but fast service", (3, 3), NEGATIVE),
    ("p08", "Old Town Bakery", "2 Market Square", "delicious bread and pastry", (1, 3), POSITIVE),
    ("p09", "Market Noodle Bar", "5 Market Square", "tasty noodles, quick lunch", (1, 2), POSITIVE),
    ("p10", "Riverside Pizza Garden", "20 River Walk", "decent pizza, noisy terrace", (4, 2), NEGATIVE),
    ("p11", "Corner Tea Room", "7 Canal Street", "lovely tea and quiet corner", (0, 4), POSITIVE),
    ("p12", "Dockside Diner", "16 Harbor Road", "cold food and unfriendly staff", (4, 0), NEGATIVE),
]


def city_places_jsonl() -> str:
    import json

    lines = []
    for pid, name, address, review, (r, c), label in CITY_PLACES:
        lat, lon = city_node_coord(r, c)
        lines.append(
            json.dumps(
                {
                    "id": pid,
                    "name": name,
                    "address": address,
                    "review": review,
                    "lat": lat,
                    "lon": lon,
                    "label": label,
                }
            )
        )
    return "\n".join(lines) + "\n"


POS_ADJECTIVES = [
    "great", "friendly", "cozy", "fresh", "quick", "lovely", "excellent",
    "generous", "tasty", "charming", "warm", "crispy", "delicious", "perfect",
]
NEG_ADJECTIVES = [
    "slow", "rude", "cold", "dirty", "overpriced", "bland", "noisy",
    "greasy", "stale", "cramped", "awful", "soggy",
]
NEUTRAL_ADJECTIVES = ["downtown", "corner", "busy", "late", "outdoor", "local"]
REVIEW_NOUNS = [
    "pizza", "pasta", "coffee", "staff", "service", "terrace", "portions",
    "prices", "burgers", "atmosphere", "tables", "menu", "salad", "bread",
    "soup", "dessert", "wine", "seating", "location", "kitchen",
]


def fsq_shape_places(n_pos=630, n_neg=59, seed=19):
    """Synthetic place records with the FourSquare corpus shape:
    689 reviews, at most ~9 extracted phrases each."""
    import json

    rng = random.Random(seed)
    lines = []
    for i in range(n_pos + n_neg):
        positive = i < n_pos
        tilted = POS_ADJECTIVES if positive else NEG_ADJECTIVES
        n_phrases = rng.randint(4, 9)
        phrases = set()
        while len(phrases) < n_phrases:
            pool = tilted if rng.random() < 0.8 else NEUTRAL_ADJECTIVES
            phrases.add(f"{rng.choice(pool)} {rng.choice(REVIEW_NOUNS)}")
        lines.append(
            json.dumps(
                {
                    "id": f"fsq{i:04d}",
                    "name": f"Venue {i}",
                    "address": f"{i} Example Street",
                    "review": ", ".join(sorted(phrases)),
                    "lat": 52.0 + (i % 50) * 1e-4,
                    "lon": 5.0 + (i // 50) * 1e-4,
                    "label": POSITIVE if positive else NEGATIVE,
                }
            )
        )
    return "\n".join(lines) + "\n"


@pytest.fixture(scope="session")
def city(tmp_path_factory):
    root = tmp_path_factory.mktemp("city")
    graph_path = root / "graph.txt"
    places_path = root / "places.jsonl"
    graph_path.write_text(city_graph_text(), encoding="utf-8")
    places_path.write_text(city_places_jsonl(), encoding="utf-8")
    return {"graph": str(graph_path), "places": str(places_path)}


@pytest.fixture(scope="session")
def city_engine(city):
    from routerec.service import Engine, EngineConfig

    config = EngineConfig(graph_path=city["graph"], places_path=city["places"])
    return Engine.load(config)
