"""Online recommendation engine and its HTTP surface.

Pipeline per query: radius-limited subgraph, candidate places matching any
query term, per-candidate shortest-path distance under the configured
algorithm, then boosted scoring. The engine is immutable once loaded;
requests are pure reads, and reload swaps in a fresh snapshot atomically.
"""
from __future__ import annotations

import json
import logging
import os
import threading

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, field, fields, replace
from typing import Optional, Sequence

from . import __version__
from .classifier import SentimentModel, classify_batch, load_model
from .corpus import Place, ingest_places
from .evalmetrics import BucketSummary, ListComparison, compare_pairs
from .routing import (
    RoadGraph,
    Route,
    RoutingError,
    dijkstra,
    astar,
    haversine,
    load_graph,
    route_coordinates,
    snap_node,
    subgraph_within_radius,
    yen_k_shortest,
)
from .scoring import (
    FieldDoc,
    IndexStats,
    build_index_stats,
    parse_query,
    rank_candidates,
    tokenize,
)
from .textprep import make_rake_tagger

log = logging.getLogger(__name__)

ALGORITHMS = ("dijkstra", "astar", "yen")
COMPARE_VARIANTS = ("astar", "dijkstra", "yen", "dijkstra_norel")
COMPARE_PAIRS = {
    "A": ("astar", "dijkstra_norel"),
    "B": ("astar", "dijkstra"),
    "C": ("astar", "yen"),
    "D": ("dijkstra", "dijkstra_norel"),
    "E": ("yen", "dijkstra_norel"),
    "F": ("yen", "dijkstra"),
}


class ServiceError(ValueError):
    pass


@dataclass(frozen=True)
class EngineConfig:
    graph_path: str = ""
    places_path: str = ""
    model_path: Optional[str] = None
    radius_m: float = 5000.0
    routing_algorithm: str = "dijkstra"
    yen_k: int = 3
    boosts_enabled: bool = True
    result_limit: int = 10
    port: int = 8000

    def __post_init__(self) -> None:
        if self.radius_m <= 0:
            raise ServiceError("radius_m must be positive")
        if self.yen_k < 1:
            raise ServiceError("yen_k must be >= 1")
        if self.routing_algorithm not in ALGORITHMS:
            raise ServiceError(f"routing_algorithm must be one of {ALGORITHMS}")


_ENV_PREFIX = "ROUTEREC_"


def load_config(path: Optional[str] = None, **overrides) -> EngineConfig:
    """TOML file values, then ROUTEREC_* env vars, then explicit overrides."""
    values: dict = {}
    if path:
        with open(path, "rb") as fh:
            values.update(tomllib.load(fh))
    for f in fields(EngineConfig):
        env = os.environ.get(_ENV_PREFIX + f.name.upper())
        if env is not None:
            if f.type in ("float",):
                values[f.name] = float(env)
            elif f.type in ("int",):
                values[f.name] = int(env)
            elif f.type in ("bool",):
                values[f.name] = env.lower() in ("1", "true", "yes", "on")
            else:
                values[f.name] = env
    for key, value in overrides.items():
        if value is not None:
            values[key] = value
    known = {f.name for f in fields(EngineConfig)}
    unknown = set(values) - known
    if unknown:
        raise ServiceError(f"unknown config keys: {sorted(unknown)}")
    return EngineConfig(**values)


class Engine:
    """Immutable search/routing engine over loaded places, graph, and model."""

    def __init__(
        self,
        config: EngineConfig,
        graph: RoadGraph,
        places: Sequence[Place],
        model: Optional[SentimentModel] = None,
        model_hash: Optional[str] = None,
    ) -> None:
        self.config = config
        self.graph = graph
        self.model = model
        self.model_hash = model_hash
        self.places = {p.id: p for p in self._assign_sentiments(places, model)}
        self.docs = {
            pid: FieldDoc.from_place(place) for pid, place in sorted(self.places.items())
        }
        self.stats: IndexStats = build_index_stats(self.docs.values())
        self.inverted: dict[str, set[str]] = {}
        for pid, doc in self.docs.items():
            for term in set(doc.name_terms) | set(doc.address_terms) | set(doc.review_terms):
                self.inverted.setdefault(term, set()).add(pid)

    @staticmethod
    def _assign_sentiments(
        places: Sequence[Place], model: Optional[SentimentModel]
    ) -> list[Place]:
        """Keep ground-truth labels; predict the rest when a model is loaded."""
        if model is None or model.dictionary is None:
            return list(places)
        tagger = make_rake_tagger()
        pending = [p for p in places if p.sentiment is None]
        transactions = []
        for place in pending:
            ids = [
                model.dictionary.id_of(term)
                for term in tagger(place.review)
                if term in model.dictionary
            ]
            transactions.append(tuple(sorted(set(ids))))
        winners = classify_batch(transactions, model)
        predicted = dict(zip((p.id for p in pending), winners))
        return [
            replace(p, sentiment=predicted[p.id])
            if p.sentiment is None and predicted.get(p.id) is not None
            else p
            for p in places
        ]

    @classmethod
    def load(cls, config: EngineConfig) -> "Engine":
        with open(config.graph_path, encoding="utf-8") as fh:
            graph, _ = load_graph(fh)
        with open(config.places_path, encoding="utf-8") as fh:
            report = ingest_places(fh)
        if report.skipped:
            log.warning("skipped %d malformed place records", len(report.skipped))
        model = None
        model_hash = None
        if config.model_path:
            model = load_model(config.model_path)
            with open(os.path.join(config.model_path, "manifest.json"), encoding="utf-8") as fh:
                model_hash = json.load(fh)["content_hash"]
        return cls(config, graph, report.places, model, model_hash)

    def _shortest_route(
        self, sub: RoadGraph, origin: int, target: int, algorithm: str
    ) -> Optional[Route]:
        if algorithm == "dijkstra":
            return dijkstra(sub, origin, target)
        if algorithm == "astar":
            return astar(sub, origin, target)[0]
        if algorithm == "yen":
            routes = yen_k_shortest(sub, origin, target, 1)
            return routes[0] if routes else None
        raise ServiceError(f"unknown routing algorithm {algorithm!r}")

    def search(
        self,
        q: str,
        lat: float,
        lon: float,
        radius_m: Optional[float] = None,
        algorithm: Optional[str] = None,
        boosts_enabled: Optional[bool] = None,
        limit: Optional[int] = None,
    ) -> list[dict]:
        if not -90.0 <= lat <= 90.0 or not -180.0 <= lon <= 180.0:
            raise ServiceError("invalid coordinates")
        query = parse_query(q)
        if not query.terms:
            raise ServiceError("empty query")
        radius = radius_m if radius_m is not None else self.config.radius_m
        algo = algorithm if algorithm is not None else self.config.routing_algorithm
        if algo == "dijkstra_norel":
            algo, boosts_enabled = "dijkstra", False
        if algo not in ALGORITHMS:
            raise ServiceError(f"unknown routing algorithm {algo!r}")
        boosts = boosts_enabled if boosts_enabled is not None else self.config.boosts_enabled
        top = limit if limit is not None else self.config.result_limit

        sub = subgraph_within_radius(self.graph, lat, lon, radius)
        origin = snap_node(sub, lat, lon) if len(sub) else None
        candidate_ids = sorted(
            {
                pid
                for term in query.terms
                for pid in self.inverted.get(term, ())
                if haversine(lat, lon, self.places[pid].lat, self.places[pid].lon) <= radius
            }
        )
        docs = []
        snapped: dict[str, Optional[int]] = {}
        for pid in candidate_ids:
            place = self.places[pid]
            distance = None
            node = None
            if origin is not None:
                node = snap_node(sub, place.lat, place.lon)
                route = self._shortest_route(sub, origin, node, algo)
                if route is not None:
                    distance = route.total_m
            snapped[pid] = node
            docs.append(FieldDoc.from_place(place, route_distance_m=distance))
        ranked = rank_candidates(query, docs, self.stats, limit=top, boosts_enabled=boosts)
        distances = {doc.place_id: doc.route_distance_m for doc in docs}
        results = []
        for pid, report in ranked:
            place = self.places[pid]
            results.append(
                {
                    "place": place_json(place),
                    "score": report.total,
                    "distance_m": distances[pid],
                    "from_node": origin,
                    "to_node": snapped[pid],
                    "breakdown": {
                        "query_norm": report.query_norm,
                        "coord": report.coord,
                        "terms": [
                            {
                                "term": ts.term,
                                "tf": ts.tf,
                                "idf": ts.idf,
                                "norm": ts.norm,
                                "boost": None
                                if ts.boost is None
                                else {
                                    "w_length": ts.boost.w_length,
                                    "w_sentiment": ts.boost.w_sentiment,
                                    "w_dist": ts.boost.w_dist,
                                    "w_pop": ts.boost.w_pop,
                                    "w_field": ts.boost.w_field,
                                    "product": ts.boost.product,
                                },
                            }
                            for ts in report.terms
                        ],
                    },
                }
            )
        return results

    def route(
        self,
        from_lat: float,
        from_lon: float,
        place_id: str,
        algorithm: Optional[str] = None,
        k: Optional[int] = None,
    ) -> list[dict]:
        place = self.places.get(place_id)
        if place is None:
            raise KeyError(place_id)
        algo = algorithm if algorithm is not None else self.config.routing_algorithm
        if algo == "dijkstra_norel":
            algo = "dijkstra"
        if algo not in ALGORITHMS:
            raise ServiceError(f"unknown routing algorithm {algo!r}")
        origin = snap_node(self.graph, from_lat, from_lon)
        target = snap_node(self.graph, place.lat, place.lon)
        if algo == "yen":
            routes = yen_k_shortest(self.graph, origin, target, k or self.config.yen_k)
        else:
            route = self._shortest_route(self.graph, origin, target, algo)
            routes = [route] if route is not None else []
        return [
            {"polyline": route_coordinates(self.graph, r), "total_m": r.total_m}
            for r in routes
        ]

    def run_variant(
        self, variant: str, queries: Sequence[tuple[str, str, float, float]], k: int
    ) -> dict[str, list[str]]:
        """Top-k place ids per query under one algorithm/boost variant."""
        run: dict[str, list[str]] = {}
        for qid, text, lat, lon in queries:
            results = self.search(text, lat, lon, algorithm=variant, limit=k)
            run[qid] = [r["place"]["id"] for r in results]
        return run

    def compare_runs(
        self, queries: Sequence[tuple[str, str, float, float]], k: int = 10
    ) -> dict[str, tuple[list[ListComparison], dict[int, BucketSummary]]]:
        """The six algorithm-pair comparisons over a query batch."""
        if not queries:
            raise ServiceError("empty query batch")
        runs = {v: self.run_variant(v, queries, k) for v in COMPARE_VARIANTS}
        return {
            pair: compare_pairs(runs[a], runs[b], k=k)
            for pair, (a, b) in COMPARE_PAIRS.items()
        }


def place_json(place: Place) -> dict:
    return {
        "id": place.id,
        "name": place.name,
        "address": place.address,
        "review": place.review,
        "lat": place.lat,
        "lon": place.lon,
        "sentiment": place.sentiment,
    }


def create_app(engine: Optional[Engine] = None, config: Optional[EngineConfig] = None):
    """FastAPI app over an engine; reload swaps the snapshot atomically."""
    from fastapi import FastAPI, HTTPException
    from fastapi.middleware.cors import CORSMiddleware

    app = FastAPI(title="routerec", version=__version__)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    state = {"engine": engine, "config": config or (engine.config if engine else None)}
    lock = threading.Lock()

    def current() -> Engine:
        eng = state["engine"]
        if eng is None:
            raise HTTPException(status_code=503, detail="engine not loaded")
        return eng

    @app.get("/api/health")
    def health():
        eng = state["engine"]
        return {
            "status": "ok" if eng is not None else "loading",
            "version": __version__,
            "model_hash": eng.model_hash if eng else None,
            "places": len(eng.places) if eng else 0,
            "graph_nodes": len(eng.graph.nodes) if eng else 0,
        }

    @app.get("/api/search")
    def search(
        q: str,
        lat: float,
        lon: float,
        radius_m: Optional[float] = None,
        algo: Optional[str] = None,
        boosts: Optional[bool] = None,
        limit: Optional[int] = None,
    ):
        try:
            results = current().search(
                q, lat, lon, radius_m=radius_m, algorithm=algo,
                boosts_enabled=boosts, limit=limit,
            )
        except (ServiceError, RoutingError) as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return {"results": results}

    @app.get("/api/route")
    def route(
        from_lat: float,
        from_lon: float,
        place_id: str,
        algo: Optional[str] = None,
        k: Optional[int] = None,
    ):
        try:
            routes = current().route(from_lat, from_lon, place_id, algorithm=algo, k=k)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown place {place_id!r}")
        except (ServiceError, RoutingError) as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return {"routes": routes, "unreachable": not routes}

    @app.get("/api/places/{place_id}")
    def place(place_id: str):
        found = current().places.get(place_id)
        if found is None:
            raise HTTPException(status_code=404, detail=f"unknown place {place_id!r}")
        return place_json(found)

    @app.post("/api/reload")
    def reload():
        cfg = state["config"]
        if cfg is None:
            raise HTTPException(status_code=503, detail="no config to reload from")
        with lock:
            state["engine"] = Engine.load(cfg)
        return {"status": "reloaded"}

    return app
