"""Enumeration of small multigraphs up to isomorphism, and random multigraphs."""

from __future__ import annotations

import itertools
import random
from typing import Iterator

from .walkgraph import MultiGraph


def _canonical(n: int, edges, perms) -> tuple:
    best = None
    for p in perms:
        key = tuple(sorted((min(p[u], p[v]), max(p[u], p[v])) for u, v in edges))
        if best is None or key < best:
            best = key
    return best


def all_multigraphs(n: int, max_edges: int, loops: bool = True) -> Iterator[MultiGraph]:
    """Every multigraph on vertices 0..n-1 with <= max_edges edges, one per isomorphism class.

    Isolated vertices are allowed, so this also covers every graph on fewer
    than n vertices.  Loops and parallel edges are included.
    """
    slots = [(u, v) for u in range(n) for v in range(u, n) if loops or u != v]
    perms = list(itertools.permutations(range(n)))
    seen = set()
    for e in range(max_edges + 1):
        for edges in itertools.combinations_with_replacement(slots, e):
            degs = [0] * n
            for u, v in edges:
                degs[u] += 1
                degs[v] += 1
            key = (tuple(sorted(degs)), _canonical(n, edges, perms))
            if key in seen:
                continue
            seen.add(key)
            yield MultiGraph(range(n), edges)


def random_multigraph(rng: random.Random, max_vertices: int = 12, max_edges: int = 18) -> MultiGraph:
    """Random multigraph; the edge count is biased towards |V| where Lemma 3 is tight."""
    n = rng.randint(1, max_vertices)
    e = min(max_edges, max(0, int(rng.gauss(n, 2))))
    edges = [(rng.randrange(n), rng.randrange(n)) for _ in range(e)]
    return MultiGraph(range(n), edges)
