"""Exact modularity, node-move sensitivity, and degeneracy enumeration.

Everything here runs in double precision; at the enumeration scale allowed
(n <= 12, so 2m <= a few dozen) values stay well conditioned and agree with
exact rationals to far better than the 1e-12 tolerance used by the tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import ConfigError, InputError
from .graph import Graph

#: Sentinel target for "move the node into a brand-new singleton community".
NEW_COMMUNITY = -1

#: Exhaustive enumeration cap; Bell(12) ~ 4.2M partitions.
MAX_ENUMERATION_NODES = 12


@dataclass(frozen=True)
class Partition:
    """Assignment of every node to a community; communities are never empty."""

    assignment: tuple[int, ...]

    @classmethod
    def from_assignment(cls, assignment: Sequence[int] | dict[int, int], n: int) -> "Partition":
        if isinstance(assignment, dict):
            if sorted(assignment) != list(range(n)):
                raise InputError("partition must cover exactly the graph's nodes")
            values = tuple(assignment[v] for v in range(n))
        else:
            if len(assignment) != n:
                raise InputError("partition must cover exactly the graph's nodes")
            values = tuple(assignment)
        return cls(values)

    @classmethod
    def from_communities(cls, communities: Iterable[Iterable[int]], n: int) -> "Partition":
        values = [-1] * n
        for cid, members in enumerate(communities):
            for v in members:
                if not 0 <= v < n or values[v] != -1:
                    raise InputError("communities must partition the node set")
            for v in members:
                values[v] = cid
        if any(v == -1 for v in values):
            raise InputError("communities must partition the node set")
        return cls(tuple(values))

    @property
    def communities(self) -> dict[int, set[int]]:
        out: dict[int, set[int]] = {}
        for v, cid in enumerate(self.assignment):
            out.setdefault(cid, set()).add(v)
        return out

    def community_of(self, v: int) -> int:
        return self.assignment[v]

    def community_ids(self) -> list[int]:
        return sorted(set(self.assignment))

    def move(self, v: int, target: int) -> "Partition":
        """New partition with v reassigned; NEW_COMMUNITY opens a fresh singleton."""
        values = list(self.assignment)
        values[v] = max(self.assignment) + 1 if target == NEW_COMMUNITY else target
        return Partition(tuple(values))


@dataclass(frozen=True)
class ModularityBreakdown:
    """Q plus the per-community internal edge counts and total degrees."""

    q: float
    per_community: dict[int, tuple[int, int]]  # cid -> (e_c, K_c)


def modularity(g: Graph, p: Partition) -> ModularityBreakdown:
    """Modularity Q = sum_c [e_c/m - (K_c/2m)^2] of a partition."""
    if g.m == 0:
        raise InputError("modularity is undefined for a graph with no edges")
    if len(p.assignment) != g.n:
        raise InputError("partition must cover exactly the graph's nodes")
    m = g.m
    internal: dict[int, int] = {}
    degree_sum: dict[int, int] = {}
    for v in range(g.n):
        cid = p.assignment[v]
        degree_sum[cid] = degree_sum.get(cid, 0) + g.degrees[v]
        internal.setdefault(cid, 0)
    for u, w in g.edges():
        if p.assignment[u] == p.assignment[w]:
            internal[p.assignment[u]] += 1
    two_m = 2.0 * m
    q = 0.0
    per = {}
    for cid in sorted(internal):
        e_c = internal[cid]
        k_c = degree_sum[cid]
        q += e_c / m - (k_c / two_m) ** 2
        per[cid] = (e_c, k_c)
    return ModularityBreakdown(q=q, per_community=per)


def move_delta(g: Graph, p: Partition, v: int, target: int) -> float:
    """Q(partition with v moved to target) - Q(partition), in O(deg v).

    ``target`` may be an existing community id (distinct from v's) or
    NEW_COMMUNITY for a fresh singleton. Only the source and target
    community terms change, which gives the closed form below.
    """
    if g.m == 0:
        raise InputError("modularity is undefined for a graph with no edges")
    source = p.assignment[v]
    if target == source:
        return 0.0
    d_src = 0
    d_tgt = 0
    for w in g.adj[v]:
        cw = p.assignment[w]
        if cw == source:
            d_src += 1
        if cw == target:
            d_tgt += 1
    k_v = g.degrees[v]
    k_src = 0
    k_tgt = 0
    for u in range(g.n):
        cu = p.assignment[u]
        if cu == source:
            k_src += g.degrees[u]
        elif cu == target:
            k_tgt += g.degrees[u]
    m = g.m
    edge_term = (d_tgt - d_src) / m
    penalty_term = (2.0 * k_v * (k_tgt - k_src) + 2.0 * k_v * k_v) / (4.0 * m * m)
    return edge_term - penalty_term


def sensitivity(g: Graph, p: Partition, v: int) -> tuple[float, int | None]:
    """Largest |Q change| over all single moves of v, and the move achieving it.

    Targets are every existing community except v's own, plus a fresh
    singleton whenever v currently has company (NEW_COMMUNITY in the result
    marks that case). Ties go to the smallest community id, fresh target
    last. Returns (0.0, None) when no move exists.
    """
    source = p.assignment[v]
    targets: list[int] = [cid for cid in p.community_ids() if cid != source]
    if sum(1 for c in p.assignment if c == source) >= 2:
        targets.append(NEW_COMMUNITY)
    if not targets:
        return 0.0, None
    best = -1.0
    best_target: int | None = None
    for target in targets:
        delta = abs(move_delta(g, p, v, target))
        if delta > best:
            best = delta
            best_target = target
    return best, best_target


# ---------------------------------------------------------------------------
# Exhaustive set-partition enumeration
# ---------------------------------------------------------------------------


def iter_set_partitions(n: int) -> Iterator[list[int]]:
    """Yield every set partition of range(n) as a restricted growth string.

    Pure-Python reference generator used as the independent oracle in tests;
    :func:`all_partition_assignments` is the fast path.
    """
    if n == 0:
        return
    rgs = [0] * n
    maxes = [0] * n
    while True:
        yield list(rgs)
        i = n - 1
        while i > 0:
            if rgs[i] <= maxes[i - 1]:
                break
            i -= 1
        if i == 0:
            return
        rgs[i] += 1
        maxes[i] = max(maxes[i - 1], rgs[i])
        for j in range(i + 1, n):
            rgs[j] = 0
            maxes[j] = maxes[i]


def all_partition_assignments(n: int) -> np.ndarray:
    """All restricted growth strings of length n as an int8 array, one per row.

    Grows the array column by column: a prefix with maximum label b extends
    with any label in 0..b+1. Row order matches :func:`iter_set_partitions`.
    """
    if n < 1:
        raise ConfigError("need at least one node to enumerate partitions")
    if n > MAX_ENUMERATION_NODES:
        raise InputError(
            f"exhaustive enumeration supports n <= {MAX_ENUMERATION_NODES}, got {n}"
        )
    rows = np.zeros((1, 1), dtype=np.int8)
    maxes = np.zeros(1, dtype=np.int8)
    for _ in range(1, n):
        counts = maxes.astype(np.int64) + 2
        total = int(counts.sum())
        rows = np.repeat(rows, counts, axis=0)
        starts = np.repeat(np.cumsum(counts) - counts, counts)
        new_col = (np.arange(total) - starts).astype(np.int8)
        rows = np.hstack([rows, new_col[:, None]])
        maxes = np.maximum(np.repeat(maxes, counts), new_col)
    return rows


def _modularity_vector(g: Graph, assignments: np.ndarray) -> np.ndarray:
    """Q for every assignment row, vectorized over partitions."""
    m = g.m
    deg = np.asarray(g.degrees, dtype=np.float64)
    intra = np.zeros(len(assignments), dtype=np.int32)
    for u, w in g.edges():
        intra += assignments[:, u] == assignments[:, w]
    penalty = np.zeros(len(assignments), dtype=np.float64)
    two_m = 2.0 * m
    for cid in range(g.n):
        k_c = (assignments == cid) @ deg
        penalty += (k_c / two_m) ** 2
    return intra / m - penalty


@dataclass(frozen=True)
class DegeneracyReport:
    """Near-optimal partition count against the exponential lower bound."""

    d: int
    n_le_d: int
    epsilon: float
    q_star: float
    degenerate_count: int  # partitions with Q* - Q < epsilon
    lower_bound: int  # 2 ** floor(n_le_d / (d + 1))
    statement_threshold: float  # d (2 + kbar) / (2m)
    proof_threshold: float  # C1 + C2

    def to_json_obj(self) -> dict:
        return {
            "d": self.d,
            "n_le_d": self.n_le_d,
            "epsilon": self.epsilon,
            "q_star": self.q_star,
            "degenerate_count": self.degenerate_count,
            "lower_bound": self.lower_bound,
            "statement_threshold": self.statement_threshold,
            "proof_threshold": self.proof_threshold,
        }


def degeneracy_thresholds(g: Graph, d: int) -> tuple[float, float]:
    """(statement threshold, proof threshold) for degree cutoff d.

    The statement-level tolerance is d(2 + kbar) / 2m. The proof-level
    tolerance adds the two constants from the counting argument:
    C1 = d(2 + kbar) / ((d + 1) kbar) bounds the summed single-move losses
    over an independent set of low-degree nodes, and
    C2 = d^2 / ((d + 1)^2 kbar^2) bounds the pairwise cross terms.
    """
    if g.m == 0:
        raise InputError("thresholds undefined for a graph with no edges")
    kbar = g.avg_degree
    statement = d * (2.0 + kbar) / (2.0 * g.m)
    proof = d * (2.0 + kbar) / ((d + 1) * kbar) + d * d / ((d + 1) ** 2 * kbar * kbar)
    return statement, proof


def enumerate_degeneracy(g: Graph, epsilon: float, d: int) -> DegeneracyReport:
    """Count partitions within epsilon of optimal modularity, exhaustively.

    Enumerates every set partition of the node set (labels irrelevant),
    records the optimum Q*, and counts partitions with Q* - Q < epsilon.
    Only graphs with n <= 12 are accepted.
    """
    if epsilon <= 0:
        raise ConfigError("epsilon must be positive")
    if d < 0:
        raise ConfigError("degree cutoff d must be >= 0")
    if g.m == 0:
        raise InputError("modularity is undefined for a graph with no edges")
    if g.n > MAX_ENUMERATION_NODES:
        raise InputError(
            f"instance too large: exhaustive enumeration needs n <= {MAX_ENUMERATION_NODES}"
            f" (got n={g.n}); sampling-based estimation is out of scope"
        )
    assignments = all_partition_assignments(g.n)
    q_values = _modularity_vector(g, assignments)
    q_star = float(q_values.max())
    count = int((q_values > q_star - epsilon).sum())
    n_le_d = sum(1 for k in g.degrees if k <= d)
    statement, proof = degeneracy_thresholds(g, d)
    return DegeneracyReport(
        d=d,
        n_le_d=n_le_d,
        epsilon=float(epsilon),
        q_star=q_star,
        degenerate_count=count,
        lower_bound=2 ** (n_le_d // (d + 1)),
        statement_threshold=statement,
        proof_threshold=proof,
    )


# ---------------------------------------------------------------------------
# Empirical verification of the sparse-graph bounds
# ---------------------------------------------------------------------------


def single_move_bound(k_i: int, m: int) -> float:
    """Largest |Q change| a single move of a degree-k_i node can cause."""
    return 2.0 * k_i / m + k_i * k_i / (2.0 * m * m)


def pair_perturbation_bound(d: int, m: int) -> float:
    """Claimed cap on how much reassigning j can shift a non-adjacent i's sensitivity."""
    return 2.0 * d * d / (4.0 * m * m)


def _test_partitions(g: Graph, seed: int, count: int) -> list[Partition]:
    """Deterministic partition battery: trivial extremes plus seeded random ones."""
    rng = np.random.default_rng(seed)
    partitions = [
        Partition(tuple([0] * g.n)),
        Partition(tuple(range(g.n))),
    ]
    for _ in range(count):
        parts = int(rng.integers(2, max(3, g.n)))
        partitions.append(Partition(tuple(int(x) for x in rng.integers(0, parts, size=g.n))))
    return partitions


@dataclass(frozen=True)
class SparseBoundsReport:
    """Outcome of the empirical move-bound and degeneracy verification run."""

    d: int
    single_move_checks: int
    single_move_max_ratio: float
    single_move_violations: int
    pair_checks: int
    pair_max_excess: float  # max observed perturbation minus the claimed bound
    pair_violations: int
    degeneracy: DegeneracyReport | None
    degeneracy_bound_holds: bool | None
    statement_count: int | None  # D at the statement-level threshold, for inspection

    @property
    def all_ok(self) -> bool:
        return (
            self.single_move_violations == 0
            and self.pair_violations == 0
            and self.degeneracy_bound_holds is not False
        )

    def to_json_obj(self) -> dict:
        return {
            "d": self.d,
            "single_move_checks": self.single_move_checks,
            "single_move_max_ratio": self.single_move_max_ratio,
            "single_move_violations": self.single_move_violations,
            "pair_checks": self.pair_checks,
            "pair_max_excess": self.pair_max_excess,
            "pair_violations": self.pair_violations,
            "degeneracy": None if self.degeneracy is None else self.degeneracy.to_json_obj(),
            "degeneracy_bound_holds": self.degeneracy_bound_holds,
            "statement_count": self.statement_count,
            "all_ok": self.all_ok,
        }


def verify_sparse_bounds(
    g: Graph,
    d: int,
    seed: int = 0,
    random_partitions: int = 12,
    tolerance: float = 1e-12,
) -> SparseBoundsReport:
    """Empirically exercise the low-degree move bounds and the degeneracy bound.

    Three checks run over a deterministic battery of partitions:

    * every move of a node with degree <= d changes Q by at most
      2 k_i / m + k_i^2 / (2 m^2);
    * for every non-adjacent pair with degrees <= d, reassigning one node
      shifts the other's sensitivity by at most 2 d^2 / (2m)^2;
    * exhaustive enumeration at the proof-level tolerance finds at least
      2^floor(n_le_d / (d+1)) near-optimal partitions. This last check needs
      n <= 12 and propagates the enumeration error on larger graphs. With
      d = 0 both tolerances collapse to zero and the bound 2^0 = 1 holds for
      any positive epsilon, so the enumeration is skipped as vacuous.
    """
    if g.m == 0:
        raise InputError("bounds are undefined for a graph with no edges")
    partitions = _test_partitions(g, seed, random_partitions)
    low = [v for v in range(g.n) if g.degrees[v] <= d]

    move_checks = 0
    move_violations = 0
    move_max_ratio = 0.0
    for p in partitions:
        for v in low:
            bound = single_move_bound(g.degrees[v], g.m)
            targets = [cid for cid in p.community_ids() if cid != p.assignment[v]]
            if sum(1 for c in p.assignment if c == p.assignment[v]) >= 2:
                targets.append(NEW_COMMUNITY)
            for target in targets:
                observed = abs(move_delta(g, p, v, target))
                move_checks += 1
                if bound > 0:
                    move_max_ratio = max(move_max_ratio, observed / bound)
                if observed > bound + tolerance:
                    move_violations += 1

    adjacency = [set(a) for a in g.adj]
    pairs = [
        (i, j)
        for i in low
        for j in low
        if i < j and j not in adjacency[i]
    ]
    pair_checks = 0
    pair_violations = 0
    pair_max_excess = float("-inf")
    bound = pair_perturbation_bound(d, g.m)
    for p in partitions:
        for i, j in pairs:
            base, _ = sensitivity(g, p, i)
            targets = [cid for cid in p.community_ids() if cid != p.assignment[j]]
            if sum(1 for c in p.assignment if c == p.assignment[j]) >= 2:
                targets.append(NEW_COMMUNITY)
            for target in targets:
                moved, _ = sensitivity(g, p.move(j, target), i)
                pair_checks += 1
                excess = abs(base - moved) - bound
                pair_max_excess = max(pair_max_excess, excess)
                if excess > tolerance:
                    pair_violations += 1
    if pair_checks == 0:
        pair_max_excess = 0.0

    statement, proof_eps = degeneracy_thresholds(g, d)
    if proof_eps > 0:
        report = enumerate_degeneracy(g, proof_eps, d)
        statement_count = enumerate_degeneracy(g, statement, d).degenerate_count
        holds: bool | None = report.degenerate_count >= report.lower_bound
    else:
        # d = 0 makes both tolerances zero; the bound 2^0 = 1 is vacuous.
        report = None
        statement_count = None
        holds = True

    return SparseBoundsReport(
        d=d,
        single_move_checks=move_checks,
        single_move_max_ratio=move_max_ratio,
        single_move_violations=move_violations,
        pair_checks=pair_checks,
        pair_max_excess=pair_max_excess,
        pair_violations=pair_violations,
        degeneracy=report,
        degeneracy_bound_holds=holds,
        statement_count=statement_count,
    )
