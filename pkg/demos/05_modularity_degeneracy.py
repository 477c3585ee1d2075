"""Why modularity optimization is unstable on sparse graphs, empirically.

Exhaustive enumeration over all set partitions of small graphs shows the
near-optimal plateau directly: sparse graphs with many degree-1 nodes admit
huge numbers of partitions within a vanishing tolerance of the optimum, so
any modularity optimizer is picking one member of a crowd. Deterministic
core structure sidesteps the crowd entirely.
"""

from corehier import (
    NEW_COMMUNITY,
    Partition,
    degeneracy_thresholds,
    enumerate_degeneracy,
    load_graph,
    modularity,
    pair_perturbation_bound,
    sensitivity,
    single_move_bound,
)
from corehier.graph import NodeMeta


def graph_from(edges):
    names = sorted({x for e in edges for x in e})
    return load_graph(edges, [NodeMeta(n) for n in names])


# Four disjoint edges: every node has degree 1, the degenerate case in pure form.
g = graph_from([("a", "b"), ("c", "d"), ("e", "f"), ("g", "h")])
statement_eps, proof_eps = degeneracy_thresholds(g, d=1)
report = enumerate_degeneracy(g, proof_eps, d=1)
print("four disjoint edges (n=8, m=4):")
print(f"  optimal Q = {report.q_star:.4f}")
print(f"  partitions within {proof_eps:.2f} of optimal: {report.degenerate_count}")
print(f"  guaranteed lower bound 2^(n_low/(d+1)) = {report.lower_bound}")
print(f"  count at the tight statement tolerance {statement_eps:.3f}: "
      f"{enumerate_degeneracy(g, statement_eps, 1).degenerate_count}")
print()

# A single low-degree move barely dents Q; that is where the plateau comes from.
path = graph_from([(f"v{i}", f"v{i+1}") for i in range(5)])
p = Partition((0,) * 6)
q0 = modularity(path, p).q
delta, target = sensitivity(path, p, 0)
print("path on 6 nodes, one community:")
print(f"  Q = {q0:.4f}; best single move of the endpoint changes Q by {delta:.4f}")
print(f"  proven per-move cap for degree-1 nodes: {single_move_bound(1, path.m):.4f}")
print()

# The pairwise coupling between two far-apart degree-1 nodes is tiny, but the
# often-quoted constant understates it by exactly a factor of two.
base, _ = sensitivity(path, p, 0)
moved, _ = sensitivity(path, p.move(5, NEW_COMMUNITY), 0)
stated = pair_perturbation_bound(1, path.m)
print("coupling between the two endpoints (non-adjacent, degree 1):")
print(f"  reassigning one endpoint shifts the other's sensitivity by {abs(base - moved):.4f}")
print(f"  stated cap 2d^2/(2m)^2 = {stated:.4f}  -> exceeded; doubled cap {2 * stated:.4f} holds")
print()
print("Takeaway: with tolerance shrinking only like 1/n, the number of")
print("near-optimal partitions grows exponentially with the count of")
print("low-degree nodes, which is most of a knowledge graph.")
