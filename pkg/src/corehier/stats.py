"""Community counts, coverage, and level selection for retrieval.

Two coverage measures are reported side by side because they answer
different questions. Node coverage is the share of corpus tokens whose node
appears in any selected community; after singleton attachment the leaf level
covers every node, so it reads 100% there. Sampled coverage restricts the
numerator to content actually admitted downstream, either the endpoints of a
selected edge sample or, absent one, per-community token mass capped at the
context window. Both count each node once.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConfigError, InputError
from .graph import Graph
from .hierarchy import Cluster, Hierarchy
from .sampling import SampleResult

LEVEL_LEAF = "LF"
LEVEL_ABOVE_LEAF = "L1"


def select_level(h: Hierarchy, tag: str | int) -> list[Cluster]:
    """Clusters at a retrieval granularity, ordered by cluster id.

    ``LF`` selects every childless cluster; ``L1`` selects the distinct
    parents of those (the root included when it directly parents a leaf).
    An integer selects clusters recorded at exactly that level.
    """
    if isinstance(tag, int):
        return [c for cid, c in sorted(h.clusters.items()) if c.level == tag]
    if tag.upper() == LEVEL_LEAF:
        return h.leaves()
    if tag.upper() == LEVEL_ABOVE_LEAF:
        parents = {c.parent for c in h.leaves() if c.parent is not None}
        return [h.clusters[cid] for cid in sorted(parents)]
    raise ConfigError(f"unknown level tag {tag!r}; expected LF, L1, or an integer")


@dataclass(frozen=True)
class CommunityStats:
    """Counts and token coverage for one selected cluster set."""

    level_tag: str
    num_communities: int
    coverage_pct: float  # node-token coverage of the selection
    coverage_pct_sampled: float | None  # admitted-content coverage, when computable
    size_histogram: dict[int, int]

    def to_json_obj(self) -> dict:
        return {
            "level_tag": self.level_tag,
            "num_communities": self.num_communities,
            "coverage_pct_nodes": self.coverage_pct,
            "coverage_pct_sampled": self.coverage_pct_sampled,
            "histogram": {str(k): v for k, v in sorted(self.size_histogram.items())},
        }


def community_stats(
    h: Hierarchy,
    tag: str | int,
    g: Graph,
    sample: SampleResult | None = None,
    token_limit: int | None = None,
) -> CommunityStats:
    """Community count, size histogram, and both coverage measures.

    With ``sample`` given, sampled coverage counts tokens of nodes incident
    to a selected edge. Otherwise, with ``token_limit`` given, each selected
    community contributes member tokens (id order, nodes counted once
    globally) until the limit cuts it off. With neither, sampled coverage is
    None.
    """
    total = sum(meta.token_count for meta in g.meta)
    if total == 0:
        raise InputError("coverage undefined: every node has zero tokens")
    selected = select_level(h, tag)

    histogram: dict[int, int] = {}
    covered: set[int] = set()
    for cluster in selected:
        size = len(cluster.members)
        histogram[size] = histogram.get(size, 0) + 1
        covered |= cluster.members
    coverage = 100.0 * sum(g.token_count(v) for v in covered) / total

    sampled: float | None = None
    if sample is not None:
        touched: set[int] = set()
        for pick in sample.selected:
            touched.update(pick.edge)
        sampled = 100.0 * sum(g.token_count(v) for v in touched) / total
    elif token_limit is not None:
        if token_limit < 1:
            raise ConfigError("token limit must be positive")
        counted: set[int] = set()
        admitted = 0
        for cluster in selected:
            room = token_limit
            for v in cluster.sorted_members():
                if v in counted:
                    continue
                tokens = g.token_count(v)
                if tokens > room:
                    break
                counted.add(v)
                admitted += tokens
                room -= tokens
        sampled = 100.0 * admitted / total

    return CommunityStats(
        level_tag=str(tag),
        num_communities=len(selected),
        coverage_pct=coverage,
        coverage_pct_sampled=sampled,
        size_histogram=histogram,
    )
