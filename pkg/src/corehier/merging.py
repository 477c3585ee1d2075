"""Post-processing passes that fold size-2 clusters into their neighbors.

Two modes share one loop: the basic pass collects only two-hop clusters of
size two, the extended pass additionally collects residual clusters of size
two. While eligible clusters remain, the one with the most distinct
neighbors inside the kept cluster set is merged into the kept leaf it shares
the most edges with; clusters with no such neighbors are promoted to stand
alone (and immediately become merge targets themselves). Hosts keep their
level and kind and may grow past the size cap; clusters of size three or
more are never touched.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from enum import Enum

from .errors import ConfigError
from .graph import Graph
from .hierarchy import Cluster, Hierarchy


class MergeMode(str, Enum):
    TWO_HOP_ONLY = "two_hop_only"
    RESIDUAL_AND_TWO_HOP = "residual_and_two_hop"

    @classmethod
    def parse(cls, text: str) -> "MergeMode":
        aliases = {
            "two_hop_only": cls.TWO_HOP_ONLY,
            "m2hc": cls.TWO_HOP_ONLY,
            "residual_and_two_hop": cls.RESIDUAL_AND_TWO_HOP,
            "mrc": cls.RESIDUAL_AND_TWO_HOP,
        }
        try:
            return aliases[text.lower()]
        except KeyError:
            raise ConfigError(f"unknown merge mode {text!r}") from None


_ELIGIBLE_KINDS = {
    MergeMode.TWO_HOP_ONLY: ("two_hop",),
    MergeMode.RESIDUAL_AND_TWO_HOP: ("two_hop", "residual"),
}


@dataclass
class MergeReport:
    """What happened to each eligible small cluster."""

    mode: MergeMode
    merged: list[tuple[int, int]] = field(default_factory=list)  # (small id, host id)
    promoted: list[int] = field(default_factory=list)
    clusters_before: int = 0
    clusters_after: int = 0
    # Members a merge found already present in its host (shared anchors);
    # the only way leaf node counts may shrink.
    deduplicated: int = 0

    def to_json_obj(self) -> dict:
        return {
            "mode": self.mode.value,
            "merged": [list(pair) for pair in self.merged],
            "promoted": list(self.promoted),
            "clusters_before": self.clusters_before,
            "clusters_after": self.clusters_after,
            "deduplicated": self.deduplicated,
        }


def _clone_hierarchy(h: Hierarchy) -> Hierarchy:
    clusters = {
        cid: Cluster(
            id=c.id,
            members=set(c.members),
            level=c.level,
            kind=c.kind,
            parent=c.parent,
            children=list(c.children),
            anchors=c.anchors,
        )
        for cid, c in h.clusters.items()
    }
    return Hierarchy(
        clusters=clusters,
        roots=list(h.roots),
        global_singletons=set(h.global_singletons),
        attached_singletons=dict(h.attached_singletons),
        max_level=h.max_level,
        max_cluster_size=h.max_cluster_size,
        leaf_ids=set(h.leaf_ids),
    )


def merge_small_clusters(
    g: Graph, h: Hierarchy, mode: MergeMode = MergeMode.TWO_HOP_ONLY
) -> tuple[Hierarchy, MergeReport]:
    """Merge eligible size-2 leaf clusters into neighboring leaves.

    Works on a private copy of the hierarchy. Merge targets are leaf
    clusters only; folding a leaf into an internal cluster would pull its
    nodes out of the leaf level entirely. Neighbor counts are re-evaluated
    against the kept set as it grows, and all ties break toward the smallest
    cluster id.
    """
    mode = MergeMode(mode)
    result = _clone_hierarchy(h)
    report = MergeReport(mode=mode, clusters_before=len(result.clusters))

    eligible_kinds = _ELIGIBLE_KINDS[mode]
    leaf_ids = [c.id for c in result.leaves()]
    small_ids = [
        cid
        for cid in leaf_ids
        if result.clusters[cid].kind in eligible_kinds and len(result.clusters[cid].members) == 2
    ]
    small_set = set(small_ids)

    # Nodes covered by the kept cluster set; shared anchor members may map to
    # several clusters at once.
    covered_in: dict[int, list[int]] = {}
    for cid in leaf_ids:
        if cid in small_set:
            continue
        for v in result.clusters[cid].members:
            covered_in.setdefault(v, []).append(cid)

    member_of_small: dict[int, list[int]] = {}
    for cid in small_ids:
        for v in result.clusters[cid].members:
            member_of_small.setdefault(v, []).append(cid)

    attached_by_cluster: dict[int, list[int]] = {}
    for v, owner in result.attached_singletons.items():
        attached_by_cluster.setdefault(owner, []).append(v)

    def covered_neighbor_count(cid: int) -> int:
        members = result.clusters[cid].members
        hits = {
            w for v in members for w in g.adj[v] if w not in members and w in covered_in
        }
        return len(hits)

    counts = {cid: covered_neighbor_count(cid) for cid in small_ids}
    heap = [(-counts[cid], cid) for cid in small_ids]
    heapq.heapify(heap)

    def mark_covered(nodes, host_id: int) -> None:
        """Record new coverage and bump the neighbor counts of touched smalls."""
        for v in sorted(nodes):
            first_time = v not in covered_in
            covered_in.setdefault(v, []).append(host_id)
            if not first_time:
                continue
            bumped: set[int] = set()
            for w in g.adj[v]:
                for sid in member_of_small.get(w, ()):
                    if sid in small_set and v not in result.clusters[sid].members:
                        bumped.add(sid)
            for sid in bumped:
                counts[sid] += 1
                heapq.heappush(heap, (-counts[sid], sid))

    while small_set:
        neg, cid = heapq.heappop(heap)
        if cid not in small_set or counts[cid] != -neg:
            continue
        small_set.discard(cid)
        small = result.clusters[cid]

        host_edges: dict[int, int] = {}
        for v in small.members:
            for w in g.adj[v]:
                if w in small.members:
                    continue
                for host_id in covered_in.get(w, ()):
                    host_edges[host_id] = host_edges.get(host_id, 0) + 1

        if host_edges:
            best = min(host_edges, key=lambda hid: (-host_edges[hid], hid))
            host = result.clusters[best]
            new_nodes = small.members - host.members
            report.deduplicated += len(small.members) - len(new_nodes)
            host.members |= small.members
            if small.parent is not None:
                result.clusters[small.parent].children.remove(cid)
            del result.clusters[cid]
            result.leaf_ids.discard(cid)
            for v in attached_by_cluster.pop(cid, ()):
                result.attached_singletons[v] = best
                attached_by_cluster.setdefault(best, []).append(v)
            mark_covered(new_nodes, best)
            report.merged.append((cid, best))
        else:
            mark_covered(small.members, cid)
            report.promoted.append(cid)

    report.clusters_after = len(result.clusters)
    result.max_level = max(c.level for c in result.clusters.values())
    return result, report
