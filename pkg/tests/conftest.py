"""Shared builders, oracles, and invariant checkers for the test suite."""

from __future__ import annotations

from collections import Counter, deque

import numpy as np
import pytest

from corehier.cores import core_numbers
from corehier.graph import Graph, NodeMeta, load_graph
from corehier.hierarchy import CLUSTER_KINDS, Hierarchy
from corehier.sampling import SampleResult, community_edge_ranking


def make_graph(edges, names=None, tokens=None) -> Graph:
    """Graph from external-id edge pairs; tokens maps name -> token count."""
    if names is None:
        names = sorted({x for e in edges for x in e})
    tokens = tokens or {}
    nodes = [NodeMeta(external_id=nm, token_count=tokens.get(nm, 0)) for nm in names]
    return load_graph(edges, nodes)


def random_graph(rng: np.random.Generator, n: int, extra_edges: int) -> Graph:
    """Random graph: spanning-tree-ish backbone plus extra edges; may have isolates."""
    names = [f"v{i:03d}" for i in range(n)]
    edges: set[tuple[int, int]] = set()
    if n > 1:
        perm = rng.permutation(n)
        for idx in range(1, n):
            if rng.random() < 0.9:  # leave occasional isolates
                a, b = int(perm[idx]), int(perm[int(rng.integers(0, idx))])
                edges.add((min(a, b), max(a, b)))
    tries = 0
    while extra_edges > 0 and tries < 20 * (extra_edges + 1):
        tries += 1
        a, b = int(rng.integers(0, n)), int(rng.integers(0, n))
        if a == b:
            continue
        key = (min(a, b), max(a, b))
        if key in edges:
            continue
        edges.add(key)
        extra_edges -= 1
    return make_graph([(names[a], names[b]) for a, b in sorted(edges)], names)


def core_numbers_oracle(g: Graph) -> list[int]:
    """Brute force: for each k, peel degree < k to fixpoint; survivors have core >= k."""
    core = [0] * g.n
    for k in range(1, g.n + 1):
        alive = set(range(g.n))
        changed = True
        while changed:
            changed = False
            for v in sorted(alive):
                if sum(1 for w in g.adj[v] if w in alive) < k:
                    alive.discard(v)
                    changed = True
        if not alive:
            break
        for v in alive:
            core[v] = k
    return core


def _connected_within(g: Graph, nodes: set[int]) -> bool:
    if not nodes:
        return False
    start = next(iter(nodes))
    seen = {start}
    dq = deque([start])
    while dq:
        u = dq.popleft()
        for w in g.adj[u]:
            if w in nodes and w not in seen:
                seen.add(w)
                dq.append(w)
    return seen == nodes


def check_hierarchy_invariants(g: Graph, h: Hierarchy, max_size: int) -> None:
    """Structural invariants every finished hierarchy must satisfy.

    Size and nesting checks exclude attached singletons and shared anchors:
    attachment is allowed to overflow the cap, and anchors belong to other
    clusters by design.
    """
    core = core_numbers(g).core
    attached_to: dict[int, set[int]] = {}
    for v, cid in h.attached_singletons.items():
        attached_to.setdefault(cid, set()).add(v)

    for c in h.clusters.values():
        assert c.members, f"cluster {c.id} is empty"
        assert c.kind in CLUSTER_KINDS
        base = set(c.members) - attached_to.get(c.id, set()) - set(c.anchors)
        assert base, f"cluster {c.id} has no base members"
        if c.kind != "root":
            assert len(base) <= max_size, f"cluster {c.id} exceeds the size cap"
        if c.kind in ("root", "core"):
            assert min(core[v] for v in base) >= c.level
            assert _connected_within(g, base), f"core cluster {c.id} is disconnected"
        if c.kind == "residual":
            assert max(core[v] for v in base) < c.level
            assert _connected_within(g, base)
        if c.kind in ("residual", "two_hop"):
            assert h.is_leaf(c.id), f"{c.kind} cluster {c.id} must be a leaf"
        if c.parent is not None:
            parent = h.clusters[c.parent]
            assert base <= parent.members, f"cluster {c.id} escapes its parent"
            assert c.level > parent.level or (c.kind != "core")
        for child in c.children:
            assert h.clusters[child].parent == c.id

    for cid in h.leaf_ids:
        assert not h.clusters[cid].children, f"leaf {cid} has children"

    # No node is covered by two leaves unless shared anchors explain it.
    anchor_nodes = {v for c in h.clusters.values() for v in c.anchors}
    seen: dict[int, int] = {}
    for leaf in h.leaves():
        for v in leaf.members:
            seen[v] = seen.get(v, 0) + 1
    for v, count in seen.items():
        assert count == 1 or v in anchor_nodes, f"node {v} is covered by {count} leaves"

    assert not h.global_singletons
    assert h.covered_nodes() == set(range(g.n)), "leaves must cover every node"
    for cid in h.roots:
        assert h.clusters[cid].parent is None


def leaf_node_multiset(h: Hierarchy) -> Counter:
    counts: Counter = Counter()
    for leaf in h.leaves():
        counts.update(leaf.members)
    return counts


def check_round_robin_properties(g: Graph, h: Hierarchy, result: SampleResult, budget: int) -> None:
    """Budget safety, prefix-rank respect, and the round-robin visit pattern."""
    assert result.total_tokens == sum(p.cost for p in result.selected)
    assert result.total_tokens <= budget

    ranking = dict(community_edge_ranking(g, h))
    by_comm = result.edges_by_community()
    for cid, picked in by_comm.items():
        assert picked == ranking[cid][: len(picked)], f"community {cid} skipped a ranked edge"

    # Round-robin: picks arrive in rounds, so the per-community ordinal of
    # successive picks never decreases and never jumps by more than one.
    ordinal: dict[int, int] = {}
    last = 0
    for pick in result.selected:
        ordinal[pick.community] = ordinal.get(pick.community, 0) + 1
        assert ordinal[pick.community] in (last, last + 1), "round-robin order violated"
        last = ordinal[pick.community]

    # Every community ends retired (exhausted or priced out), and a community
    # with zero picks and a nonempty list must have been priced out.
    assert sorted(result.retired) == sorted(ranking.keys())
    priced_out = set(result.unaffordable)
    for cid, edges in ranking.items():
        if edges and not by_comm.get(cid):
            assert cid in priced_out


@pytest.fixture(scope="session")
def sparse_fixture_batch():
    """Shared batch of seeded sparse fixtures for the heavier suites."""
    from corehier.fixtures import generate_kg_sparse
    from corehier.graph import largest_connected_component

    batch = []
    for seed in range(8):
        edges, nodes = generate_kg_sparse(1000, seed=seed)
        batch.append(largest_connected_component(load_graph(edges, nodes)))
    return batch
