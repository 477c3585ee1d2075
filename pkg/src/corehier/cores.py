"""Linear-time core decomposition via bucket peeling."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import InputError
from .graph import Graph


@dataclass(frozen=True)
class CoreDecomposition:
    """Core numbers for every node, the shell partition, and the maximum core."""

    core: list[int]
    max_core: int
    shells: dict[int, list[int]] = field(default_factory=dict)

    def shell_of(self, v: int) -> int:
        return self.core[v]


def core_numbers(g: Graph) -> CoreDecomposition:
    """Compute every node's core number by peeling degree buckets.

    The core number of v is the largest k such that v lies in a subgraph of
    minimum degree >= k. Peeling always removes a node of minimum remaining
    degree; the buckets use lazy deletion (a decremented node is re-appended
    and stale entries are skipped), which keeps the whole run at O(n + m)
    since every edge causes at most one decrement per endpoint. The result
    does not depend on peeling order. Isolated nodes get core 0.
    """
    if g.self_loops:
        raise InputError("core decomposition requires a simple graph; self-loops present")
    n = g.n
    if n == 0:
        return CoreDecomposition(core=[], max_core=0)

    deg = list(g.degrees)
    max_deg = max(deg)
    peeled = bytearray(n)
    buckets: list[list[int]] = [[] for _ in range(max_deg + 1)]
    for v in range(n):
        buckets[deg[v]].append(v)

    adj = g.adj
    for d in range(max_deg + 1):
        bucket = buckets[d]
        while bucket:
            v = bucket.pop()
            if peeled[v] or deg[v] != d:
                continue
            peeled[v] = 1
            # deg[v] freezes at the removal degree, which is the core number:
            # the clamp below keeps removal degrees non-decreasing.
            for u in adj[v]:
                du = deg[u]
                if du > d and not peeled[u]:
                    deg[u] = du - 1
                    buckets[du - 1].append(u)

    core = deg
    max_core = max(core)
    shells: dict[int, list[int]] = {}
    for v in range(n):
        shells.setdefault(core[v], []).append(v)
    return CoreDecomposition(core=core, max_core=max_core, shells=shells)
