"""Cosine-similarity networks per window and shortest-path target distances.

Similarities are computed between attribute columns of the incidence matrix,
one pair at a time with a fixed summation order, so results are reproducible
bit for bit and threshold comparisons behave predictably on exact boundary
cases.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

from .windowing import Attribute, IncidenceMatrix, TimeWindow

#: Floor for target edge lengths; keeps cosine-1 pairs from collapsing.
MIN_EDGE_LENGTH = 0.05


class ZeroVector(ValueError):
    """Cosine of an all-zero vector is undefined."""


def cosine(u, v) -> float:
    """Salton's cosine of two nonnegative vectors, in double precision."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    nu = math.sqrt(float(np.dot(u, u)))
    nv = math.sqrt(float(np.dot(v, v)))
    if nu == 0.0 or nv == 0.0:
        raise ZeroVector("cosine undefined for a zero-norm vector")
    return float(np.dot(u, v)) / (nu * nv)


@dataclass(frozen=True)
class SliceGraph:
    """Undirected attribute network of one window.

    Edges are (i, j, weight) with i < j indexing into `nodes`; `components`
    partitions node indices, each group sorted, groups ordered by first
    member.
    """

    window: TimeWindow
    nodes: tuple[Attribute, ...]
    edges: tuple[tuple[int, int, float], ...]
    components: tuple[tuple[int, ...], ...]

    def node_index(self) -> dict[Attribute, int]:
        return {a: i for i, a in enumerate(self.nodes)}

    def to_edge_tsv(self) -> str:
        """Debug dump: one `kindA:labelA<TAB>kindB:labelB<TAB>cosine` line per edge."""
        lines = [f"{self.nodes[i].key()}\t{self.nodes[j].key()}\t{w:.6f}"
                 for i, j, w in self.edges]
        return "\n".join(lines) + ("\n" if lines else "")


def _components(n: int, edges) -> tuple[tuple[int, ...], ...]:
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j, _w in edges:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return tuple(tuple(groups[root]) for root in sorted(groups))


def build_slice_graph(matrix: IncidenceMatrix, threshold: float) -> SliceGraph:
    """All-pairs cosine network over matrix columns, thresholded inclusively."""
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold must be in [0, 1], got {threshold}")
    n = len(matrix.attributes)
    if n == 0:
        return SliceGraph(matrix.window, (), (), ())
    m = matrix.array()
    cols = [np.ascontiguousarray(m[:, j]) for j in range(n)]
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            w = cosine(cols[i], cols[j])
            if w >= threshold:
                edges.append((i, j, w))
    return SliceGraph(matrix.window, matrix.attributes, tuple(edges),
                      _components(n, edges))


@dataclass(frozen=True, eq=False)
class ComponentDistances:
    """Target distances and weights for one connected component.

    `nodes` holds indices into the slice graph's node list; `dist` is the
    symmetric shortest-path matrix over dissimilarity edge lengths and
    `weight` its elementwise inverse square (zero diagonal).
    """

    nodes: tuple[int, ...]
    dist: np.ndarray
    weight: np.ndarray


@dataclass(frozen=True, eq=False)
class DistanceTable:
    window: TimeWindow
    components: tuple[ComponentDistances, ...]

    def lookup(self, i: int, j: int) -> float | None:
        """Target distance between two graph node indices; None across components."""
        for comp in self.components:
            if i in comp.nodes and j in comp.nodes:
                return float(comp.dist[comp.nodes.index(i), comp.nodes.index(j)])
        return None


def _dijkstra(source: int, adjacency: dict[int, list[tuple[int, float]]]) -> dict[int, float]:
    dist = {source: 0.0}
    heap = [(0.0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist.get(u, math.inf):
            continue
        for v, step in adjacency[u]:
            nd = d + step
            if nd < dist.get(v, math.inf):
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist


def target_distances(graph: SliceGraph) -> DistanceTable:
    """Per-component all-pairs target distances for the layout stage.

    Each edge gets dissimilarity length max(1 - cosine, MIN_EDGE_LENGTH);
    target distance is the shortest path over those lengths, and the stress
    weight is distance^-2.  Pairs in different components get no entry.
    """
    adjacency: dict[int, list[tuple[int, float]]] = {i: [] for i in range(len(graph.nodes))}
    for i, j, w in graph.edges:
        step = max(1.0 - w, MIN_EDGE_LENGTH)
        adjacency[i].append((j, step))
        adjacency[j].append((i, step))
    for lst in adjacency.values():
        lst.sort()

    comps = []
    for members in graph.components:
        k = len(members)
        local = {n: t for t, n in enumerate(members)}
        dist = np.zeros((k, k))
        for t, source in enumerate(members):
            reach = _dijkstra(source, adjacency)
            for n, d in reach.items():
                dist[t, local[n]] = d
        # per-source float sums can differ in the last ulp; keep it symmetric
        dist = np.minimum(dist, dist.T)
        with np.errstate(divide="ignore"):
            weight = np.where(dist > 0.0, dist, np.inf) ** -2.0
        np.fill_diagonal(weight, 0.0)
        comps.append(ComponentDistances(members, dist, weight))
    return DistanceTable(graph.window, tuple(comps))
