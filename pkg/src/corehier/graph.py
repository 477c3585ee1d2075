"""Graph container, ingestion, and pre-clustering cleanup.

The clustering stages all operate on the largest connected component with
self-loops removed, mirroring how GraphRAG prepares its knowledge graph
before community detection.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import InputError


@dataclass(frozen=True)
class NodeMeta:
    """Per-node metadata: stable external id, display label, token count."""

    external_id: str
    label: str = ""
    token_count: int = 0

    def __post_init__(self) -> None:
        if self.token_count < 0:
            raise InputError(f"node {self.external_id!r}: token count must be >= 0")


class Graph:
    """Immutable simple undirected graph over dense integer node ids.

    Internal ids are assigned in lexicographic order of external ids, so
    identical inputs always produce identical numbering; every deterministic
    tie-break downstream relies on that ordering. Adjacency lists are sorted
    and never contain the node itself: nodes carrying a self-loop are listed
    in ``self_loops`` until :func:`largest_connected_component` strips them.

    Treat instances as frozen once constructed; nothing in the package
    mutates them, which makes concurrent reads safe.
    """

    __slots__ = ("n", "m", "adj", "degrees", "meta", "self_loops", "_ext_index")

    def __init__(
        self,
        adj: list[list[int]],
        meta: list[NodeMeta],
        self_loops: frozenset[int] = frozenset(),
    ):
        if len(adj) != len(meta):
            raise InputError("adjacency and metadata lengths differ")
        self.n = len(adj)
        self.adj = adj
        self.meta = meta
        self.self_loops = self_loops
        # A self-loop counts as one edge and contributes 2 to its node's
        # degree, which keeps the handshake identity sum(k_i) == 2m intact.
        self.m = sum(len(a) for a in adj) // 2 + len(self_loops)
        self.degrees = [len(adj[v]) + (2 if v in self_loops else 0) for v in range(self.n)]
        self._ext_index = {mt.external_id: i for i, mt in enumerate(meta)}

    @property
    def avg_degree(self) -> float:
        return 2.0 * self.m / self.n if self.n else 0.0

    def id_of(self, external_id: str) -> int:
        return self._ext_index[external_id]

    def external_id(self, v: int) -> str:
        return self.meta[v].external_id

    def token_count(self, v: int) -> int:
        return self.meta[v].token_count

    def edges(self) -> Iterator[tuple[int, int]]:
        """Yield every non-loop edge once as (u, v) with u < v, in sorted order."""
        for u in range(self.n):
            for w in self.adj[u]:
                if u < w:
                    yield (u, w)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"Graph(n={self.n}, m={self.m})"


def load_graph(
    edge_records: Iterable[tuple[str, str]],
    node_records: Iterable[NodeMeta] = (),
) -> Graph:
    """Build a graph from raw edge and node records.

    Edge endpoints missing from ``node_records`` are auto-registered with an
    empty label and zero tokens. Parallel edges collapse to one; self-loops
    are kept (they disappear with :func:`largest_connected_component`).
    Internal ids follow lexicographic external-id order.
    """
    meta_by_id: dict[str, NodeMeta] = {}
    for rec in node_records:
        if rec.external_id in meta_by_id:
            raise InputError(f"duplicate node id {rec.external_id!r}")
        meta_by_id[rec.external_id] = rec

    raw_edges = []
    for src, dst in edge_records:
        if not src or not dst:
            raise InputError("edge with empty endpoint id")
        for ext in (src, dst):
            if ext not in meta_by_id:
                meta_by_id[ext] = NodeMeta(external_id=ext)
        raw_edges.append((src, dst))

    if not meta_by_id:
        raise InputError("empty input: no nodes")

    order = sorted(meta_by_id)
    index = {ext: i for i, ext in enumerate(order)}
    meta = [meta_by_id[ext] for ext in order]

    seen: set[tuple[int, int]] = set()
    loops: set[int] = set()
    adj: list[list[int]] = [[] for _ in order]
    for src, dst in raw_edges:
        u, w = index[src], index[dst]
        if u == w:
            loops.add(u)
            continue
        key = (u, w) if u < w else (w, u)
        if key in seen:
            continue
        seen.add(key)
        adj[u].append(w)
        adj[w].append(u)
    for lst in adj:
        lst.sort()

    return Graph(adj, meta, frozenset(loops))


def _components(adj: list[list[int]], n: int) -> list[list[int]]:
    """Connected components as sorted id lists, ordered by smallest member."""
    seen = [False] * n
    comps = []
    for start in range(n):
        if seen[start]:
            continue
        seen[start] = True
        comp = [start]
        dq = deque([start])
        while dq:
            u = dq.popleft()
            for w in adj[u]:
                if not seen[w]:
                    seen[w] = True
                    comp.append(w)
                    dq.append(w)
        comps.append(sorted(comp))
    return comps


def is_connected(g: Graph) -> bool:
    return g.n > 0 and len(_components(g.adj, g.n)) == 1


def largest_connected_component(g: Graph) -> Graph:
    """Induced subgraph on the largest component, with all self-loops removed.

    Size ties go to the component containing the smallest external id, which
    is the component with the smallest internal id because ids are assigned
    lexicographically. Node metadata is carried over; ids are re-densified
    preserving relative order.
    """
    if g.n == 0:
        raise InputError("empty input: no nodes")
    comps = _components(g.adj, g.n)
    best = max(comps, key=lambda c: (len(c), -c[0]))
    keep = {v: i for i, v in enumerate(best)}
    adj = [[keep[w] for w in g.adj[v] if w in keep] for v in best]
    meta = [g.meta[v] for v in best]
    return Graph(adj, meta)


def strip_self_loops(g: Graph) -> Graph:
    """Copy of the graph with self-loops dropped and components kept as-is."""
    if not g.self_loops:
        return g
    return Graph([list(a) for a in g.adj], list(g.meta))
