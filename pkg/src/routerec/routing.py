"""Geo-embedded road graph and shortest-path search.

Dijkstra, A* with a haversine heuristic, and Yen's k shortest loopless
paths. Edge lengths are clamped up to the straight-line distance at load so
the heuristic stays admissible. All tie-breaking is deterministic (smallest
node id, then lexicographic node sequence) so ranked route lists are
comparable across runs.
"""
from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass, field
from math import asin, cos, radians, sin, sqrt
from typing import Optional, Sequence, TextIO

log = logging.getLogger(__name__)

EARTH_RADIUS_M = 6_371_000.0


class RoutingError(ValueError):
    pass


def haversine(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    """Great-circle distance in meters between two lat/lon points."""
    p1, p2 = radians(lat1), radians(lat2)
    dlat = p2 - p1
    dlon = radians(lon2) - radians(lon1)
    a = sin(dlat / 2) ** 2 + cos(p1) * cos(p2) * sin(dlon / 2) ** 2
    return 2 * EARTH_RADIUS_M * asin(sqrt(a))


@dataclass(frozen=True)
class RoadNode:
    id: int
    lat: float
    lon: float

    def __post_init__(self) -> None:
        if not -90.0 <= self.lat <= 90.0:
            raise RoutingError(f"node {self.id}: latitude out of range")
        if not -180.0 <= self.lon <= 180.0:
            raise RoutingError(f"node {self.id}: longitude out of range")


@dataclass(frozen=True)
class Route:
    path: tuple[int, ...]
    total_m: float


@dataclass
class RoadGraph:
    nodes: dict[int, RoadNode] = field(default_factory=dict)
    adjacency: dict[int, list[tuple[int, float]]] = field(default_factory=dict)
    edges: list[tuple[int, int, float, bool]] = field(default_factory=list)

    def add_node(self, node_id: int, lat: float, lon: float) -> None:
        if node_id in self.nodes:
            raise RoutingError(f"duplicate node id {node_id}")
        self.nodes[node_id] = RoadNode(node_id, lat, lon)
        self.adjacency[node_id] = []

    def add_edge(self, u: int, v: int, length_m: float, directed: bool = False) -> None:
        if u not in self.nodes or v not in self.nodes:
            raise RoutingError(f"edge ({u},{v}) references a missing node")
        if length_m <= 0:
            raise RoutingError(f"edge ({u},{v}) must have positive length")
        self.edges.append((u, v, length_m, directed))
        self.adjacency[u].append((v, length_m))
        if not directed:
            self.adjacency[v].append((u, length_m))

    def finalize(self) -> None:
        for neighbors in self.adjacency.values():
            neighbors.sort()

    def __len__(self) -> int:
        return len(self.nodes)


def load_graph(source: TextIO) -> tuple[RoadGraph, int]:
    """Parse the node/edge section format; returns (graph, clamped edges).

    Edges shorter than the straight-line distance between their endpoints
    are clamped up to it, which keeps the A* heuristic admissible.
    """
    graph = RoadGraph()
    section = None
    clamped = 0
    for line_no, raw in enumerate(source, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line == "nodes:":
            section = "nodes"
            continue
        if line == "edges:":
            section = "edges"
            continue
        parts = line.split()
        if section == "nodes":
            if len(parts) != 3:
                raise RoutingError(f"line {line_no}: expected 'id lat lon'")
            graph.add_node(int(parts[0]), float(parts[1]), float(parts[2]))
        elif section == "edges":
            if len(parts) not in (3, 4):
                raise RoutingError(f"line {line_no}: expected 'u v length_m [directed]'")
            u, v, length = int(parts[0]), int(parts[1]), float(parts[2])
            directed = len(parts) == 4 and parts[3] == "directed"
            a, b = graph.nodes[u], graph.nodes[v]
            floor = haversine(a.lat, a.lon, b.lat, b.lon)
            if length < floor:
                clamped += 1
                length = floor
            graph.add_edge(u, v, length, directed)
        else:
            raise RoutingError(f"line {line_no}: content before a section header")
    graph.finalize()
    if clamped:
        log.warning("clamped %d edges up to straight-line distance", clamped)
    return graph, clamped


def write_graph(graph: RoadGraph, fh: TextIO) -> None:
    fh.write("nodes:\n")
    for node_id in sorted(graph.nodes):
        node = graph.nodes[node_id]
        fh.write(f"{node.id} {node.lat} {node.lon}\n")
    fh.write("edges:\n")
    for u, v, length, directed in graph.edges:
        suffix = " directed" if directed else ""
        fh.write(f"{u} {v} {length}{suffix}\n")


def subgraph_within_radius(
    graph: RoadGraph, lat: float, lon: float, radius_m: float
) -> RoadGraph:
    """Nodes within radius of the origin, plus edges with both ends kept."""
    if radius_m <= 0:
        raise RoutingError("radius_m must be positive")
    keep = {
        node_id
        for node_id, node in graph.nodes.items()
        if haversine(lat, lon, node.lat, node.lon) <= radius_m
    }
    sub = RoadGraph()
    for node_id in keep:
        node = graph.nodes[node_id]
        sub.add_node(node_id, node.lat, node.lon)
    for u, v, length, directed in graph.edges:
        if u in keep and v in keep:
            sub.add_edge(u, v, length, directed)
    sub.finalize()
    return sub


def _check_endpoints(graph: RoadGraph, start: int, goal: int) -> None:
    for node_id in (start, goal):
        if node_id not in graph.nodes:
            raise RoutingError(f"unknown node {node_id}")


def _search(
    graph: RoadGraph,
    start: int,
    goal: int,
    heuristic,
    banned_nodes: Optional[set[int]] = None,
    banned_edges: Optional[set[tuple[int, int]]] = None,
) -> tuple[Optional[Route], int]:
    """Best-first search; heuristic=0 is Dijkstra. Ties pop smallest node id."""
    banned_nodes = banned_nodes or set()
    banned_edges = banned_edges or set()
    dist = {start: 0.0}
    parent: dict[int, int] = {}
    heap: list[tuple[float, int]] = [(heuristic(start), start)]
    done: set[int] = set()
    expanded = 0
    while heap:
        _, node = heapq.heappop(heap)
        if node in done:
            continue
        done.add(node)
        expanded += 1
        if node == goal:
            path = [node]
            while path[-1] != start:
                path.append(parent[path[-1]])
            path.reverse()
            return Route(path=tuple(path), total_m=dist[goal]), expanded
        for neighbor, length in graph.adjacency[node]:
            if neighbor in done or neighbor in banned_nodes:
                continue
            if (node, neighbor) in banned_edges:
                continue
            candidate = dist[node] + length
            if candidate < dist.get(neighbor, float("inf")):
                dist[neighbor] = candidate
                parent[neighbor] = node
                heapq.heappush(heap, (candidate + heuristic(neighbor), neighbor))
    return None, expanded


def dijkstra(graph: RoadGraph, start: int, goal: int) -> Optional[Route]:
    """Minimal-length route, or None when the goal is unreachable."""
    _check_endpoints(graph, start, goal)
    route, _ = _search(graph, start, goal, lambda _n: 0.0)
    return route


def dijkstra_expanded(graph: RoadGraph, start: int, goal: int) -> tuple[Optional[Route], int]:
    _check_endpoints(graph, start, goal)
    return _search(graph, start, goal, lambda _n: 0.0)


def astar(graph: RoadGraph, start: int, goal: int) -> tuple[Optional[Route], int]:
    """As dijkstra, plus the expanded-node count for diagnostics."""
    _check_endpoints(graph, start, goal)
    goal_node = graph.nodes[goal]

    def heuristic(node_id: int) -> float:
        node = graph.nodes[node_id]
        return haversine(node.lat, node.lon, goal_node.lat, goal_node.lon)

    return _search(graph, start, goal, heuristic)


def yen_k_shortest(graph: RoadGraph, start: int, goal: int, k: int) -> list[Route]:
    """Up to k loopless routes in non-decreasing length (Yen's deviations).

    Ties order by the lexicographic node-id sequence. Fewer than k existing
    paths yields a shorter list.
    """
    if k < 1:
        raise RoutingError("k must be >= 1")
    _check_endpoints(graph, start, goal)
    first = dijkstra(graph, start, goal)
    if first is None:
        return []
    accepted: list[Route] = [first]
    candidates: list[tuple[float, tuple[int, ...]]] = []
    seen: set[tuple[int, ...]] = {first.path}

    while len(accepted) < k:
        prev = accepted[-1].path
        for i in range(len(prev) - 1):
            spur = prev[i]
            root = prev[: i + 1]
            banned_edges: set[tuple[int, int]] = set()
            for route in accepted:
                if route.path[: i + 1] == root and len(route.path) > i + 1:
                    banned_edges.add((route.path[i], route.path[i + 1]))
            for _, path in candidates:
                if path[: i + 1] == root and len(path) > i + 1:
                    banned_edges.add((path[i], path[i + 1]))
            banned_nodes = set(root[:-1])
            spur_route, _ = _search(
                graph,
                spur,
                goal,
                lambda _n: 0.0,
                banned_nodes=banned_nodes,
                banned_edges=banned_edges,
            )
            if spur_route is None:
                continue
            total_path = root[:-1] + spur_route.path
            if total_path in seen:
                continue
            root_cost = _path_cost(graph, root)
            heapq.heappush(candidates, (root_cost + spur_route.total_m, total_path))
            seen.add(total_path)
        if not candidates:
            break
        cost, path = heapq.heappop(candidates)
        accepted.append(Route(path=path, total_m=cost))
    return accepted


def _path_cost(graph: RoadGraph, path: Sequence[int]) -> float:
    total = 0.0
    for u, v in zip(path, path[1:]):
        lengths = [length for neighbor, length in graph.adjacency[u] if neighbor == v]
        if not lengths:
            raise RoutingError(f"path uses missing edge ({u},{v})")
        total += min(lengths)
    return total


def snap_node(graph: RoadGraph, lat: float, lon: float) -> int:
    """Nearest node by haversine; ties go to the smallest id."""
    if not graph.nodes:
        raise RoutingError("cannot snap onto an empty graph")
    return min(
        graph.nodes,
        key=lambda node_id: (
            haversine(lat, lon, graph.nodes[node_id].lat, graph.nodes[node_id].lon),
            node_id,
        ),
    )


def snap_place(graph: RoadGraph, place) -> int:
    return snap_node(graph, place.lat, place.lon)


def route_coordinates(graph: RoadGraph, route: Route) -> list[list[float]]:
    return [[graph.nodes[n].lat, graph.nodes[n].lon] for n in route.path]
