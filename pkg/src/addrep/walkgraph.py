"""Multigraphs, nontrivial closed walks, and the even-walk decision procedure.

A nontrivial closed walk v_1, e_1, ..., v_n, e_n, v_1 uses every edge at most
twice and at least one edge exactly once; it is even when n is even.  Loops
and parallel edges are allowed, and n = 1 (a single loop) is a walk.

Decision rule used by :func:`detect_even_closed_walk`: an even walk exists iff
some connected component has an even cycle or cycle rank >= 2.  The rule is
checked against the exhaustive :func:`brute_force_even_walk` oracle in the
test suite rather than trusted.
"""

from __future__ import annotations

import json
from collections import Counter, deque
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

from .errors import BudgetExceeded, InconsistentInput, MalformedWalk, SpecError


@dataclass(frozen=True)
class MultiGraph:
    vertices: frozenset
    edges: tuple  # tuple of (u, v); u == v is a loop

    def __init__(self, vertices: Iterable[int], edges: Iterable[tuple[int, int]]):
        verts = frozenset(vertices)
        es = tuple((u, v) for u, v in edges)
        for idx, (u, v) in enumerate(es):
            if u not in verts or v not in verts:
                raise InconsistentInput(f"edge {idx} = {{{u}, {v}}} has an undeclared endpoint")
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", es)

    def incidence(self) -> dict:
        """vertex -> list of (edge index, other endpoint); a loop is listed once."""
        inc = {v: [] for v in self.vertices}
        for idx, (u, v) in enumerate(self.edges):
            inc[u].append((idx, v))
            if u != v:
                inc[v].append((idx, u))
        return inc

    def to_dict(self) -> dict:
        return {"vertices": sorted(self.vertices), "edges": [list(e) for e in self.edges]}


@dataclass(frozen=True)
class Walk:
    vertices: tuple
    edges: tuple

    def __len__(self) -> int:
        return len(self.edges)

    def to_list(self) -> list:
        """Alternating [v_1, e_1, v_2, ..., e_n, v_1] with edges as {"edge": i}."""
        out = []
        for v, e in zip(self.vertices, self.edges):
            out += [v, {"edge": e}]
        return out + [self.vertices[0]] if self.vertices else out

    @classmethod
    def from_steps(cls, steps) -> "Walk":
        return cls(tuple(v for v, _ in steps), tuple(e for _, e in steps))


@dataclass(frozen=True)
class ComponentSummary:
    vertex_count: int
    edge_count: int
    excess: int
    cycle_rank: int
    unique_cycle_parity: str  # "odd", "even", "none" (rank 0) or "multiple" (rank >= 2)

    def to_dict(self) -> dict:
        return {
            "v": self.vertex_count,
            "e": self.edge_count,
            "excess": self.excess,
            "cycle_rank": self.cycle_rank,
            "parity": self.unique_cycle_parity,
        }


@dataclass(frozen=True)
class WalkVerdict:
    walk: Optional[Walk]
    components: tuple

    @property
    def found(self) -> bool:
        return self.walk is not None

    def to_dict(self) -> dict:
        return {
            "verdict": "even_walk" if self.found else "none",
            "walk": self.walk.to_list() if self.found else None,
            "components": [c.to_dict() for c in self.components],
        }


def is_nontrivial_even_closed_walk(G: MultiGraph, w: Walk) -> bool:
    n = len(w.edges)
    if n < 1 or len(w.vertices) != n:
        raise MalformedWalk("a closed walk needs n >= 1 vertices and n edges")
    for i, e in enumerate(w.edges):
        if not 0 <= e < len(G.edges):
            raise MalformedWalk(f"edge index {e} out of range")
        a, b = w.vertices[i], w.vertices[(i + 1) % n]
        if sorted((a, b)) != sorted(G.edges[e]):
            raise MalformedWalk(f"edge {e} = {G.edges[e]} does not join {a} and {b}")
    if n % 2:
        return False
    usage = Counter(w.edges)
    return max(usage.values()) <= 2 and 1 in usage.values()


def _components(G: MultiGraph, inc: dict):
    seen = set()
    for root in sorted(G.vertices):
        if root in seen:
            continue
        seen.add(root)
        parent = {root: (None, None)}
        depth = {root: 0}
        order = [root]
        tree_edges = set()
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for idx, v in inc[u]:
                if v not in parent:
                    parent[v] = (u, idx)
                    depth[v] = depth[u] + 1
                    tree_edges.add(idx)
                    seen.add(v)
                    order.append(v)
                    queue.append(v)
        edge_ids = sorted({idx for u in order for idx, _ in inc[u]})
        yield order, edge_ids, tree_edges, parent, depth


def _tree_path(parent, depth, u, v):
    """Steps (vertex, edge) walking the tree from u to v."""
    up, down = [], []
    while depth[u] > depth[v]:
        p, idx = parent[u]
        up.append((u, idx))
        u = p
    while depth[v] > depth[u]:
        p, idx = parent[v]
        down.append((p, idx))
        v = p
    while u != v:
        pu, iu = parent[u]
        pv, iv = parent[v]
        up.append((u, iu))
        down.append((pv, iv))
        u, v = pu, pv
    return up + down[::-1]


def _fundamental_cycle(G, parent, depth, idx):
    u, v = G.edges[idx]
    return [(u, idx)] + _tree_path(parent, depth, v, u)


def _rotate(cycle, start):
    i = next(k for k, (v, _) in enumerate(cycle) if v == start)
    return cycle[i:] + cycle[:i]


def _join_odd_cycles(inc, c1, c2):
    """Even walk from two odd cycles: share a vertex, or link by a doubled path."""
    v1 = {v for v, _ in c1}
    v2 = {v for v, _ in c2}
    common = v1 & v2
    if common:
        s = min(common)
        return _rotate(c1, s) + _rotate(c2, s)
    prev = {v: None for v in v1}
    queue = deque(sorted(v1))
    end = None
    while queue and end is None:
        u = queue.popleft()
        for idx, w in inc[u]:
            if w not in prev:
                prev[w] = (u, idx)
                if w in v2:
                    end = w
                    break
                queue.append(w)
    path = []
    w = end
    while prev[w] is not None:
        u, idx = prev[w]
        path.append((u, idx))
        w = u
    path.reverse()
    start = path[0][0]
    back = []
    cur = end
    for u, idx in reversed(path):
        back.append((cur, idx))
        cur = u
    return _rotate(c1, start) + path + _rotate(c2, end) + back


def detect_even_closed_walk(G: MultiGraph) -> WalkVerdict:
    inc = G.incidence()
    summaries = []
    witness = None
    for order, edge_ids, tree_edges, parent, depth in _components(G, inc):
        nv, ne = len(order), len(edge_ids)
        rank = ne - nv + 1
        extra = [i for i in edge_ids if i not in tree_edges]
        cycles = [_fundamental_cycle(G, parent, depth, i) for i in extra[:2]]
        if rank == 0:
            parity = "none"
        elif rank == 1:
            parity = "odd" if len(cycles[0]) % 2 else "even"
        else:
            parity = "multiple"
        summaries.append(ComponentSummary(nv, ne, ne - nv, rank, parity))
        if witness is not None or rank == 0:
            continue
        even = [c for c in cycles if len(c) % 2 == 0]
        if even:
            witness = even[0]
        elif rank >= 2:
            witness = _join_odd_cycles(inc, cycles[0], cycles[1])
    walk = Walk.from_steps(witness) if witness is not None else None
    if walk is not None and not is_nontrivial_even_closed_walk(G, walk):
        raise AssertionError(f"constructed walk {walk} is not a nontrivial even closed walk")
    return WalkVerdict(walk, tuple(summaries))


def brute_force_even_walk(
    G: MultiGraph, max_len: Optional[int] = None, node_cap: int = 2_000_000
) -> Optional[Walk]:
    """Exhaustive search for a nontrivial even closed walk of length <= max_len.

    Depth-first over (current vertex, per-edge usage) states from every start
    vertex, never revisiting a state.  Independent of the cycle-rank rule.
    """
    if max_len is None:
        max_len = 2 * len(G.edges)
    inc = G.incidence()
    expansions = 0
    for start in sorted(G.vertices):
        if not inc[start]:
            continue
        zero = (0,) * len(G.edges)
        seen = {(start, zero)}
        stack = [(start, zero, 0, [])]
        while stack:
            v, usage, length, steps = stack.pop()
            expansions += 1
            if expansions > node_cap:
                raise BudgetExceeded(f"more than {node_cap} search states")
            if v == start and length and length % 2 == 0 and 1 in usage:
                return Walk.from_steps(steps)
            if length == max_len:
                continue
            for idx, w in inc[v]:
                if usage[idx] == 2:
                    continue
                nu = usage[:idx] + (usage[idx] + 1,) + usage[idx + 1 :]
                if (w, nu) in seen:
                    continue
                seen.add((w, nu))
                stack.append((w, nu, length + 1, steps + [(v, idx)]))
    return None


@dataclass(frozen=True)
class Lemma3Report:
    verdict: WalkVerdict
    vertex_count: int
    edge_count: int
    holds: Optional[bool]  # None when an even walk exists (no claim made)

    @property
    def component_excess(self) -> list:
        return [c.excess for c in self.verdict.components]

    def to_dict(self) -> dict:
        return {
            "vertices": self.vertex_count,
            "edges": self.edge_count,
            "even_walk": self.verdict.found,
            "walk": self.verdict.walk.to_list() if self.verdict.found else None,
            "edges_le_vertices": self.holds,
            "component_excess": self.component_excess,
        }


def lemma3_check(G: MultiGraph) -> Lemma3Report:
    """Run the detector; without an even walk, |E| <= |V| must hold."""
    verdict = detect_even_closed_walk(G)
    nv, ne = len(G.vertices), len(G.edges)
    if verdict.found:
        return Lemma3Report(verdict, nv, ne, None)
    bad = [c for c in verdict.components if c.excess not in (-1, 0)]
    return Lemma3Report(verdict, nv, ne, ne <= nv and not bad)


def build_gk(sets, table, k: int) -> MultiGraph:
    """G_k: vertices S_k, one edge {c_{i,k}, d_{i,k}} per index i in M_k."""
    edges = []
    for i in sorted(sets.M):
        pair = table.pair(i, k)
        if pair is None:
            raise InconsistentInput(f"pair ({i}, {k}) is a violation but {i} is in M_{k}")
        edges.append(pair)
    if len(set(edges)) != len(edges):
        raise InconsistentInput(f"two indices give the same pair in G_{k}")
    try:
        G = MultiGraph(sets.S, edges)
    except InconsistentInput as exc:
        raise InconsistentInput(f"G_{k}: {exc}") from exc
    if len(G.edges) != len(sets.M):
        raise InconsistentInput(f"|E(G_{k})| != |M_{k}|")
    return G


def read_graph_file(path) -> MultiGraph:
    """Text format (`V E` then E lines `u v`, labels 0..V-1) or JSON {vertices, edges}."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise SpecError(f"cannot read graph file {path}: {exc}") from exc
    if text.lstrip().startswith("{"):
        try:
            doc = json.loads(text)
            return MultiGraph(doc["vertices"], [tuple(e) for e in doc["edges"]])
        except (ValueError, KeyError, TypeError) as exc:
            raise SpecError(f"bad JSON graph in {path}: {exc}") from exc
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    try:
        nv, ne = map(int, rows[0])
        edges = [(int(u), int(v)) for u, v in rows[1:]]
    except (IndexError, ValueError) as exc:
        raise SpecError(f"bad graph text in {path}: {exc}") from exc
    if len(edges) != ne:
        raise SpecError(f"{path}: header says {ne} edges, found {len(edges)}")
    return MultiGraph(range(nv), edges)


def write_graph_text(G: MultiGraph, path) -> None:
    labels = sorted(G.vertices)
    if labels != list(range(len(labels))):
        raise SpecError("text format needs vertex labels 0..V-1; use JSON instead")
    lines = [f"{len(labels)} {len(G.edges)}"] + [f"{u} {v}" for u, v in G.edges]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
