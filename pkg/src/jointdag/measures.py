"""Topological measures of binary directed networks.

All measures treat the graph as unweighted.  Quantities that are undefined
for a given graph (assortativity with fewer than two edges, rich-club with
no level holding at least two nodes) are reported as ``nan`` rather than
raised, so reports over graph collections stay rectangular.
"""

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidArgumentError

__all__ = [
    "degrees",
    "density",
    "global_efficiency",
    "local_efficiency",
    "clustering_and_transitivity",
    "assortativity",
    "rich_club_max",
    "find_hubs",
    "compute_measures",
    "MeasureReport",
    "HubReport",
]


def degrees(graph):
    """Per-node (in_degree, out_degree, sum_degree) arrays."""
    A = graph.adjacency()
    indeg = A.sum(axis=0)
    outdeg = A.sum(axis=1)
    return indeg, outdeg, indeg + outdeg


def density(graph):
    """Fraction of possible directed edges present: ``|E| / (d (d - 1))``."""
    if graph.d < 2:
        raise InvalidArgumentError("density requires at least 2 nodes")
    return graph.n_edges / (graph.d * (graph.d - 1))


def _hop_distances(A):
    """All-pairs shortest hop counts by BFS; inf where unreachable."""
    d = A.shape[0]
    out = [np.flatnonzero(A[v]) for v in range(d)]
    dist = np.full((d, d), np.inf)
    for s in range(d):
        dist[s, s] = 0.0
        frontier = [s]
        depth = 0
        while frontier:
            depth += 1
            nxt = []
            for v in frontier:
                for u in out[v]:
                    if not np.isfinite(dist[s, u]):
                        dist[s, u] = depth
                        nxt.append(u)
            frontier = nxt
    return dist


def _global_efficiency_adj(A):
    d = A.shape[0]
    if d < 2:
        return 0.0
    dist = _hop_distances(A)
    inv = np.zeros_like(dist)
    finite = np.isfinite(dist) & (dist > 0)
    inv[finite] = 1.0 / dist[finite]
    return float(inv.sum()) / (d * (d - 1))


def global_efficiency(graph):
    """Mean inverse shortest-path length over ordered node pairs.

    Distances are hop counts along directed edges; unreachable pairs
    contribute zero.
    """
    if graph.d < 2:
        raise InvalidArgumentError("global efficiency requires at least 2 nodes")
    return _global_efficiency_adj(graph.adjacency())


def local_efficiency(graph):
    """Per-node efficiency of the induced neighborhood, and its mean.

    The neighborhood of a node is the union of its in- and out-neighbors
    (the node itself excluded).  A node with fewer than two neighbors
    scores zero; otherwise its score is the global efficiency of the
    subgraph induced on the neighborhood.

    Returns
    -------
    (ndarray of shape (d,), float)
    """
    A = graph.adjacency()
    d = graph.d
    per_node = np.zeros(d)
    for v in range(d):
        nbrs = np.flatnonzero((A[v] > 0) | (A[:, v] > 0))
        nbrs = nbrs[nbrs != v]
        if nbrs.size < 2:
            continue
        sub = A[np.ix_(nbrs, nbrs)]
        per_node[v] = _global_efficiency_adj(sub)
    return per_node, float(per_node.mean())


def clustering_and_transitivity(graph):
    """Directed clustering (triangle-based) per node, its mean, and the
    network transitivity.

    Counts all directed triangles through a node as
    ``t_v = ((A + A^T)^3)_vv / 2`` and normalizes by
    ``k_v (k_v - 1) - 2 r_v`` where ``k_v`` is the sum degree and ``r_v``
    the number of reciprocated partners.  Nodes with a zero denominator
    score zero.  Transitivity is the ratio of the summed triangle counts to
    the summed denominators (zero when the denominator sum is zero).

    Returns
    -------
    (ndarray of shape (d,), float, float)
        Per-node coefficients, their mean, and the transitivity.
    """
    A = graph.adjacency().astype(np.float64)
    S = A + A.T
    triangles = np.diag(np.linalg.matrix_power(S, 3)) / 2.0
    k_tot = A.sum(axis=0) + A.sum(axis=1)
    recip = np.diag(A @ A)
    denom = k_tot * (k_tot - 1) - 2.0 * recip
    per_node = np.zeros(graph.d)
    positive = denom > 0
    per_node[positive] = triangles[positive] / denom[positive]
    denom_sum = float(denom.sum())
    transitivity = float(triangles.sum()) / denom_sum if denom_sum > 0 else 0.0
    return per_node, float(per_node.mean()), transitivity


def _pearson(x, y):
    """Population Pearson correlation; zero when either side is constant."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    xc = x - x.mean()
    yc = y - y.mean()
    sx = math.sqrt(float((xc * xc).mean()))
    sy = math.sqrt(float((yc * yc).mean()))
    if sx == 0.0 or sy == 0.0:
        return 0.0
    return float((xc * yc).mean()) / (sx * sy)


def assortativity(graph):
    """Mean degree assortativity over the four direction combinations.

    For every edge (u, v) the source and target degrees are paired four
    ways (out-in, in-out, out-out, in-in); each pairing contributes its
    Pearson correlation across the edge list, with constant degree
    sequences contributing zero.  Returns ``nan`` when the graph has fewer
    than two edges.
    """
    if graph.n_edges < 2:
        return float("nan")
    indeg, outdeg, _ = degrees(graph)
    edges = graph.sorted_edges()
    src = np.array([e[0] for e in edges])
    dst = np.array([e[1] for e in edges])
    combos = [
        (outdeg[src], indeg[dst]),
        (indeg[src], outdeg[dst]),
        (outdeg[src], outdeg[dst]),
        (indeg[src], indeg[dst]),
    ]
    return float(np.mean([_pearson(x, y) for x, y in combos]))


def rich_club_max(graph):
    """Largest rich-club coefficient over all degree levels.

    For each level k from 1 to the maximum sum degree minus 1, the
    coefficient is the density of the subgraph induced on nodes whose sum
    degree exceeds k.  Levels retaining fewer than two nodes are skipped;
    ``nan`` is returned when no level qualifies.
    """
    _, _, sumdeg = degrees(graph)
    max_deg = int(sumdeg.max()) if graph.d else 0
    if max_deg < 1:
        return float("nan")
    A = graph.adjacency()
    best = float("nan")
    for k in range(1, max_deg):
        nodes = np.flatnonzero(sumdeg > k)
        if nodes.size < 2:
            continue
        sub = A[np.ix_(nodes, nodes)]
        coeff = float(sub.sum()) / (nodes.size * (nodes.size - 1))
        if math.isnan(best) or coeff > best:
            best = coeff
    return best


@dataclass(frozen=True)
class HubReport:
    """Nodes whose degree exceeds the mean by three standard deviations.

    ``sum_hubs`` lists only nodes that qualify on sum degree without
    already qualifying as in- or out-hubs.  Each entry is (label, degree),
    sorted by descending degree then node index.
    """

    in_hubs: tuple
    out_hubs: tuple
    sum_hubs: tuple

    def to_dict(self):
        return {
            "in_hubs": [list(h) for h in self.in_hubs],
            "out_hubs": [list(h) for h in self.out_hubs],
            "sum_hubs": [list(h) for h in self.sum_hubs],
        }


def find_hubs(graph, ddof=0):
    """Degree hubs of each kind (in, out, sum).

    A node is a hub of a kind when its degree strictly exceeds
    ``mean + 3 * sd`` of that degree sequence.  ``ddof`` selects the
    standard-deviation convention: 0 for the population form (default) or
    1 for the sample form.
    """
    if ddof not in (0, 1):
        raise InvalidArgumentError(f"ddof must be 0 or 1, got {ddof!r}")
    indeg, outdeg, sumdeg = degrees(graph)

    def _hubs(deg):
        threshold = deg.mean() + 3.0 * deg.std(ddof=ddof)
        nodes = [v for v in range(graph.d) if deg[v] > threshold]
        nodes.sort(key=lambda v: (-deg[v], v))
        return nodes

    in_nodes = _hubs(indeg)
    out_nodes = _hubs(outdeg)
    sum_nodes = [v for v in _hubs(sumdeg) if v not in set(in_nodes) | set(out_nodes)]
    labels = graph.node_labels
    return HubReport(
        in_hubs=tuple((labels[v], int(indeg[v])) for v in in_nodes),
        out_hubs=tuple((labels[v], int(outdeg[v])) for v in out_nodes),
        sum_hubs=tuple((labels[v], int(sumdeg[v])) for v in sum_nodes),
    )


@dataclass(frozen=True)
class MeasureReport:
    """All scalar measures plus the per-node table.

    ``per_node`` rows are (in_degree, out_degree, sum_degree, clustering,
    local_efficiency) in node order.  Undefined scalar measures are nan.
    """

    density: float
    global_efficiency: float
    local_efficiency_mean: float
    clustering_mean: float
    transitivity: float
    assortativity: float
    rich_club_max: float
    hubs: HubReport
    per_node: tuple

    def to_dict(self):
        def _num(x):
            return None if isinstance(x, float) and math.isnan(x) else x

        return {
            "density": _num(self.density),
            "global_efficiency": _num(self.global_efficiency),
            "local_efficiency_mean": _num(self.local_efficiency_mean),
            "clustering_mean": _num(self.clustering_mean),
            "transitivity": _num(self.transitivity),
            "assortativity": _num(self.assortativity),
            "rich_club_max": _num(self.rich_club_max),
            "hubs": self.hubs.to_dict(),
            "per_node": [list(row) for row in self.per_node],
        }


def compute_measures(graph, hub_ddof=0):
    """Compute every supported measure for one graph.

    Returns
    -------
    MeasureReport
    """
    indeg, outdeg, sumdeg = degrees(graph)
    loc_eff, loc_eff_mean = local_efficiency(graph)
    clust, clust_mean, trans = clustering_and_transitivity(graph)
    per_node = tuple(
        (int(indeg[v]), int(outdeg[v]), int(sumdeg[v]), float(clust[v]),
         float(loc_eff[v]))
        for v in range(graph.d)
    )
    return MeasureReport(
        density=density(graph),
        global_efficiency=global_efficiency(graph),
        local_efficiency_mean=loc_eff_mean,
        clustering_mean=clust_mean,
        transitivity=trans,
        assortativity=assortativity(graph),
        rich_club_max=rich_club_max(graph),
        hubs=find_hubs(graph, ddof=hub_ddof),
        per_node=per_node,
    )
