"""Graphs, deterministic generators and BFS oracles."""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

KINDS = ("path", "cycle", "star", "complete", "hypercube", "random_tree", "random_connected")
RANDOM_KINDS = ("random_tree", "random_connected")


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class Graph:
    """Simple connected undirected graph with distinct node labels in ``[0, L)``.

    Node ids ``0..n-1`` are internal; protocols only ever see ``labels``.
    """

    adj: tuple[tuple[int, ...], ...]
    labels: tuple[int, ...]
    L: int

    def __post_init__(self) -> None:
        n = len(self.adj)
        if n < 1:
            raise GraphError("graph must have at least one node")
        if len(self.labels) != n:
            raise GraphError("one label per node required")
        for u, nbrs in enumerate(self.adj):
            if list(nbrs) != sorted(set(nbrs)):
                raise GraphError(f"neighbours of {u} must be sorted and unique")
            for v in nbrs:
                if v == u:
                    raise GraphError(f"self-loop at {u}")
                if not 0 <= v < n or u not in self.adj[v]:
                    raise GraphError(f"asymmetric edge {u}-{v}")
        if len(set(self.labels)) != n:
            raise GraphError("labels must be pairwise distinct")
        if any(not 0 <= lab < self.L for lab in self.labels):
            raise GraphError(f"labels must lie in [0, {self.L})")
        if min(bfs(self, 0)) < 0:
            raise GraphError("graph is not connected")

    @property
    def n(self) -> int:
        return len(self.adj)

    @property
    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u, nbrs in enumerate(self.adj) for v in nbrs if u < v]

    def node_of_label(self, label: int) -> int:
        return self.labels.index(label)

    def relabel(self, labels: Sequence[int], L: int | None = None) -> Graph:
        return Graph(self.adj, tuple(labels), self.L if L is None else L)

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: Iterable[tuple[int, int]],
        labels: Sequence[int] | None = None,
        L: int | None = None,
    ) -> Graph:
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if u == v:
                raise GraphError(f"self-loop at {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge {u}-{v} out of range")
            if v in nbrs[u]:
                raise GraphError(f"duplicate edge {u}-{v}")
            nbrs[u].add(v)
            nbrs[v].add(u)
        labels = tuple(range(n)) if labels is None else tuple(labels)
        if L is None:
            L = max(n, max(labels) + 1)
        return cls(tuple(tuple(sorted(s)) for s in nbrs), labels, L)


def bfs(graph: Graph, source: int) -> list[int]:
    """Hop distances from ``source``; unreachable nodes get -1."""
    if not 0 <= source < len(graph.adj):
        raise IndexError(f"source {source} out of range")
    dist = [-1] * len(graph.adj)
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in graph.adj[u]:
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def multi_source_bfs(graph: Graph, start: dict[int, int]) -> list[int]:
    """``min over s of start[s] + dist(s, v)`` for every node ``v``.

    This is the wake-up round of every node when the nodes in ``start`` are
    woken at the given rounds and every woken node beeps once right after.
    """
    best = [-1] * graph.n
    order = sorted(start.items(), key=lambda kv: (kv[1], kv[0]))
    # Dial's algorithm: unit edge weights, integer start offsets.
    buckets: dict[int, list[int]] = {}
    for node, t in order:
        buckets.setdefault(t, []).append(node)
    if not buckets:
        return best
    t = min(buckets)
    while buckets:
        for u in buckets.pop(t, []):
            if best[u] >= 0:
                continue
            best[u] = t
            for v in graph.adj[u]:
                if best[v] < 0:
                    buckets.setdefault(t + 1, []).append(v)
        t += 1
    return best


def eccentricity(graph: Graph, v: int) -> int:
    return max(bfs(graph, v))


def diameter(graph: Graph) -> int:
    return max(eccentricity(graph, v) for v in range(graph.n))


def _labels_for(n: int, L: int | None, seed: int | None, rng: random.Random | None) -> tuple[tuple[int, ...], int]:
    L = n if L is None else L
    if L < n:
        raise GraphError(f"label space L={L} smaller than n={n}")
    if seed is None:
        return tuple(range(n)), L
    return tuple(rng.sample(range(L), n)), L


def generate(
    kind: str,
    n: int,
    seed: int | None = None,
    *,
    L: int | None = None,
    p: float = 0.1,
    labels: Sequence[int] | None = None,
) -> Graph:
    """Build a graph of the given kind with ``n`` nodes.

    ``star`` has node 0 as centre and ``n - 1`` leaves.  ``random_tree``
    attaches each node of a seeded shuffle to a uniformly chosen earlier
    node; ``random_connected`` is such a tree plus every remaining pair
    added independently with probability ``p``.

    Labels default to ``0..n-1`` when no seed is given, otherwise a seeded
    distinct draw from ``[0, L)``.  The same seed always yields the same
    graph and labels.
    """
    if kind not in KINDS:
        raise GraphError(f"unknown kind {kind!r}; choose from {', '.join(KINDS)}")
    if n < 1:
        raise GraphError("size must be at least 1")
    if kind in RANDOM_KINDS and seed is None:
        raise GraphError(f"{kind} requires a seed")
    rng = random.Random(seed) if seed is not None else None

    edges: list[tuple[int, int]]
    if kind == "path":
        edges = [(i, i + 1) for i in range(n - 1)]
    elif kind == "cycle":
        if n < 3:
            raise GraphError("a simple cycle needs at least 3 nodes")
        edges = [(i, (i + 1) % n) for i in range(n)]
    elif kind == "star":
        edges = [(0, i) for i in range(1, n)]
    elif kind == "complete":
        edges = [(u, v) for u in range(n) for v in range(u + 1, n)]
    elif kind == "hypercube":
        if n & (n - 1):
            raise GraphError("hypercube size must be a power of two")
        dim = n.bit_length() - 1
        edges = [(u, u ^ (1 << k)) for u in range(n) for k in range(dim) if u < u ^ (1 << k)]
    else:
        order = list(range(n))
        rng.shuffle(order)
        edges = [(order[i], order[rng.randrange(i)]) for i in range(1, n)]
        if kind == "random_connected":
            present = {frozenset(e) for e in edges}
            for u in range(n):
                for v in range(u + 1, n):
                    if frozenset((u, v)) not in present and rng.random() < p:
                        edges.append((u, v))

    if labels is None:
        labels, L = _labels_for(n, L, seed, rng)
    elif L is None:
        L = max(n, max(labels) + 1)
    return Graph.from_edges(n, edges, labels, L)


def format_graph(graph: Graph) -> str:
    """Header ``n e L``, then one ``u v`` line per edge and one ``node label`` line per node."""
    edges = graph.edges
    lines = [f"{graph.n} {len(edges)} {graph.L}"]
    lines += [f"{u} {v}" for u, v in edges]
    lines += [f"{i} {lab}" for i, lab in enumerate(graph.labels)]
    return "\n".join(lines) + "\n"


def write_graph(graph: Graph, path: str | Path) -> None:
    Path(path).write_text(format_graph(graph))


def read_graph(path: str | Path) -> Graph:
    rows = [line.split() for line in Path(path).read_text().splitlines() if line.strip()]
    try:
        n, e, L = (int(x) for x in rows[0])
        edges = [(int(u), int(v)) for u, v in rows[1 : 1 + e]]
        labels = [0] * n
        seen = set()
        for i, lab in rows[1 + e : 1 + e + n]:
            labels[int(i)] = int(lab)
            seen.add(int(i))
    except (ValueError, IndexError) as exc:
        raise GraphError(f"malformed graph file {path}: {exc}") from exc
    if len(rows) != 1 + e + n or len(seen) != n:
        raise GraphError(f"malformed graph file {path}: expected {e} edges and {n} labels")
    return Graph.from_edges(n, edges, labels, L)
