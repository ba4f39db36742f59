"""Shared builders for the test suite: distance tables from raw metrics,
randomized slices, and the large synthetic corpus used by the scale checks."""
from __future__ import annotations

import random

import numpy as np

from chronogram.layout import LayoutSlice
from chronogram.simnet import ComponentDistances, DistanceTable, SliceGraph
from chronogram.windowing import Attribute, Kind, window_at


def single_component_table(dist, window_index: int = 0) -> DistanceTable:
    """Wrap a symmetric distance matrix as a one-component table (w = d^-2)."""
    dist = np.asarray(dist, dtype=float)
    with np.errstate(divide="ignore"):
        weight = np.where(dist > 0.0, dist, np.inf) ** -2.0
    np.fill_diagonal(weight, 0.0)
    comp = ComponentDistances(tuple(range(len(dist))), dist, weight)
    return DistanceTable(window_at(window_index, 1950, 5), (comp,))


def random_metric_table(rng: np.random.Generator, n: int,
                        jitter: float = 0.0) -> DistanceTable:
    """Euclidean distances of random plane points, optionally stretched
    pairwise by up to `jitter` (symmetry preserved, so still a valid target)."""
    pts = rng.uniform(-2.0, 2.0, size=(n, 2))
    diff = pts[:, None, :] - pts[None, :, :]
    d = np.sqrt((diff ** 2).sum(axis=2))
    if jitter > 0.0:
        stretch = rng.uniform(1.0, 1.0 + jitter, size=(n, n))
        stretch = np.triu(stretch, 1)
        d = d * (stretch + stretch.T + np.eye(n))
    d = np.maximum(d, 0.05)
    np.fill_diagonal(d, 0.0)
    return single_component_table(d)


_LABEL_CHARS = "abcdefghijklmnopqrstuvwxyz0123456789 -.,"


def random_slice(rng: random.Random, window_index: int = 0,
                 max_nodes: int = 12) -> tuple[SliceGraph, LayoutSlice]:
    """A random styled graph plus positions, for Pajek round-trip checks."""
    n = rng.randint(1, max_nodes)
    nodes = []
    seen = set()
    while len(nodes) < n:
        kind = rng.choice(list(Kind))
        label = "".join(rng.choice(_LABEL_CHARS) for _ in range(rng.randint(2, 14))).strip()
        if not label or (kind, label) in seen:
            continue
        seen.add((kind, label))
        nodes.append(Attribute(kind, label))
    nodes.sort()
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < 0.3:
                edges.append((i, j, rng.uniform(0.2, 1.0)))
    graph = SliceGraph(window_at(window_index, 1950, 5), tuple(nodes),
                       tuple(edges), _brute_components(n, edges))
    positions = {a: (rng.uniform(-4.0, 4.0), rng.uniform(-4.0, 4.0)) for a in nodes}
    return graph, LayoutSlice(graph.window, positions)


def _brute_components(n: int, edges) -> tuple[tuple[int, ...], ...]:
    groups = [{i} for i in range(n)]
    for i, j, _w in edges:
        gi = next(g for g in groups if i in g)
        gj = next(g for g in groups if j in g)
        if gi is not gj:
            groups.remove(gj)
            gi.update(gj)
    return tuple(tuple(sorted(g)) for g in sorted(groups, key=min))


def scale_corpus_text() -> str:
    """300 documents over 12 five-year windows with a Zipf-ish vocabulary.

    Tuned so that roughly 500 distinct attributes survive default filtering:
    each window draws titles from a 100-word slice of a rolling vocabulary
    (stride 50, so neighboring windows share half their words), plus a
    per-window author pool and a recurring anchor-style author.
    """
    rng = random.Random(42)
    words = ["term%03d" % i for i in range(12 * 50 + 100)]
    journals = ["J APPL INFORM", "SCIENTOMETRICS", "INFORM PROCESS",
                "DOC SCI", "LIBR QUART"]
    lines = []
    n = 0
    for win in range(12):
        base = 1950 + win * 5
        vocab = words[win * 50: win * 50 + 100]
        weights = [1.0 / (r + 3) ** 0.9 for r in range(len(vocab))]
        authors = ["AUTHOR %c%d" % (65 + (win * 6 + k) % 26, (win * 6 + k) % 60)
                   for k in range(14)]
        for _ in range(25):
            n += 1
            title = rng.choices(vocab, weights=weights, k=rng.randint(6, 10))
            aus = rng.sample(authors, rng.randint(1, 3))
            if rng.random() < 0.4:
                aus.append("Garfield, E")
            lines.append("AU " + aus[0])
            for a in aus[1:]:
                lines.append("   " + a)
            lines.append("TI " + " ".join(title))
            lines.append("SO " + rng.choice(journals))
            lines.append("PY %d" % (base + rng.randrange(5)))
            lines.append("UT SCALE%04d" % n)
            lines.append("ER")
    lines.append("EF")
    return "\n".join(lines) + "\n"
