"""Binary directed graphs: thresholding, cycle checks, edge-list files."""

import csv
import heapq
import warnings
from dataclasses import dataclass

import numpy as np

from ._validation import as_square_matrix, check_nonnegative
from .exceptions import DataIngestionError, InvalidArgumentError

__all__ = [
    "BinaryDigraph",
    "CycleRepairWarning",
    "is_acyclic",
    "threshold_edges",
    "threshold_to_dag",
    "write_edge_tsv",
    "read_edge_tsv",
]


class CycleRepairWarning(UserWarning):
    """Thresholding had to drop edges to restore acyclicity.

    Instances carry the removed edges on the ``removed`` attribute as a
    tuple of (source, target) index pairs.
    """

    def __init__(self, message, removed=()):
        super().__init__(message)
        self.removed = tuple(removed)


@dataclass(frozen=True)
class BinaryDigraph:
    """Unweighted directed graph on ``d`` labelled nodes.

    Self-loops are rejected; cycles among distinct nodes are representable
    (use :func:`is_acyclic` to certify a graph).
    """

    d: int
    edges: frozenset
    node_labels: tuple = ()

    def __post_init__(self):
        if self.d < 1:
            raise InvalidArgumentError(f"d must be >= 1, got {self.d}")
        edges = frozenset((int(i), int(j)) for i, j in self.edges)
        for i, j in edges:
            if not (0 <= i < self.d and 0 <= j < self.d):
                raise InvalidArgumentError(
                    f"edge ({i}, {j}) out of range for d={self.d}"
                )
            if i == j:
                raise InvalidArgumentError(f"self-loop ({i}, {i}) is not allowed")
        object.__setattr__(self, "edges", edges)
        labels = tuple(self.node_labels) if self.node_labels else tuple(
            f"x{v}" for v in range(self.d)
        )
        if len(labels) != self.d:
            raise InvalidArgumentError(
                f"expected {self.d} node labels, got {len(labels)}"
            )
        if len(set(labels)) != self.d:
            raise InvalidArgumentError("node labels must be unique")
        object.__setattr__(self, "node_labels", labels)

    @property
    def n_edges(self):
        return len(self.edges)

    def adjacency(self):
        """Dense 0/1 adjacency matrix of shape (d, d)."""
        A = np.zeros((self.d, self.d), dtype=np.int64)
        for i, j in self.edges:
            A[i, j] = 1
        return A

    def sorted_edges(self):
        return sorted(self.edges)


def is_acyclic(graph):
    """Certify acyclicity of a :class:`BinaryDigraph`.

    Returns
    -------
    (bool, list of int or None)
        ``(True, order)`` with a topological order of node indices when
        the graph is acyclic, else ``(False, None)``.  The order is
        deterministic: among ready nodes the smallest index is emitted
        first.
    """
    d = graph.d
    indeg = [0] * d
    out = [[] for _ in range(d)]
    for i, j in graph.edges:
        indeg[j] += 1
        out[i].append(j)
    ready = [v for v in range(d) if indeg[v] == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        v = heapq.heappop(ready)
        order.append(v)
        for u in out[v]:
            indeg[u] -= 1
            if indeg[u] == 0:
                heapq.heappush(ready, u)
    if len(order) != d:
        return False, None
    return True, order


def _edges_on_cycles(edges, d):
    """Edges (u, v) such that v can reach u through the edge set."""
    out = [[] for _ in range(d)]
    for u, v in edges:
        out[u].append(v)
    reach_cache = {}

    def _reaches(src, dst):
        key = src
        seen = reach_cache.get(key)
        if seen is None:
            seen = set()
            stack = [src]
            while stack:
                v = stack.pop()
                if v in seen:
                    continue
                seen.add(v)
                stack.extend(out[v])
            reach_cache[key] = seen
        return dst in seen

    return [(u, v) for (u, v) in edges if _reaches(v, u)]


def threshold_edges(W, omega):
    """Threshold a weight matrix and repair cycles.

    Keeps edges with ``|W[i, j]| > omega`` (strict), then, while the kept
    set contains a cycle, removes the cycle-participating edge with the
    smallest absolute weight, breaking ties toward the lexicographically
    smallest (i, j) pair.

    Returns
    -------
    (kept, removed)
        Sorted lists of (i, j) pairs: the surviving edge set and the edges
        dropped by cycle repair, in removal order.
    """
    W = as_square_matrix(W)
    omega = check_nonnegative(omega, "omega")
    d = W.shape[0]
    kept = {
        (i, j)
        for i in range(d)
        for j in range(d)
        if i != j and abs(W[i, j]) > omega
    }
    removed = []
    while True:
        cyclic = _edges_on_cycles(kept, d)
        if not cyclic:
            break
        victim = min(cyclic, key=lambda e: (abs(W[e[0], e[1]]), e[0], e[1]))
        kept.discard(victim)
        removed.append(victim)
    return sorted(kept), removed


def threshold_to_dag(W, omega, node_labels=None):
    """Binary DAG obtained by thresholding a weight matrix at ``omega``.

    Diagonal entries are ignored.  If thresholding alone leaves a cycle,
    minimum-|weight| cycle edges are removed until the graph is acyclic and
    a :class:`CycleRepairWarning` listing the removals is emitted.

    Parameters
    ----------
    W : ndarray of shape (d, d)
    omega : float
        Non-negative threshold; an edge requires ``|W[i, j]| > omega``.
    node_labels : sequence of str, optional

    Returns
    -------
    BinaryDigraph
        An acyclic graph.
    """
    W = as_square_matrix(W)
    kept, removed = threshold_edges(W, omega)
    if removed:
        warnings.warn(
            CycleRepairWarning(
                f"removed {len(removed)} edge(s) to restore acyclicity: {removed}",
                removed=removed,
            ),
            stacklevel=2,
        )
    labels = tuple(node_labels) if node_labels is not None else ()
    return BinaryDigraph(W.shape[0], frozenset(kept), labels)


def write_edge_tsv(path, graph, weights=None):
    """Write a graph as a TSV edge list.

    Columns are source_label, target_label, weight.  When ``weights`` is
    given it must be a (d, d) matrix and each edge's entry is written;
    otherwise every edge gets weight 1.  Edges are written in sorted
    (source, target) index order.  Numbers use 17 significant digits so
    values round-trip exactly.
    """
    if weights is not None:
        weights = as_square_matrix(weights, name="weights")
        if weights.shape[0] != graph.d:
            raise InvalidArgumentError(
                f"weights are {weights.shape[0]}x{weights.shape[0]} but the "
                f"graph has {graph.d} nodes"
            )
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, delimiter="\t", lineterminator="\n")
        writer.writerow(["source_label", "target_label", "weight"])
        for i, j in graph.sorted_edges():
            w = 1.0 if weights is None else weights[i, j]
            writer.writerow([
                graph.node_labels[i], graph.node_labels[j], format(w, ".17g"),
            ])


def read_edge_tsv(path, node_labels=None):
    """Read a TSV edge list written by :func:`write_edge_tsv`.

    Parameters
    ----------
    path : str
    node_labels : sequence of str, optional
        Fixes the node universe and its order.  When omitted, the nodes are
        the labels appearing in the file, sorted.

    Returns
    -------
    (BinaryDigraph, dict)
        The graph and a mapping from (i, j) edge to its float weight.
    """
    rows = []
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh, delimiter="\t")
        for ln, row in enumerate(reader, start=1):
            if not row:
                continue
            if ln == 1 and row[:2] == ["source_label", "target_label"]:
                continue
            if len(row) < 3:
                raise DataIngestionError(
                    f"expected 3 columns, found {len(row)}", path=path, row=ln
                )
            try:
                w = float(row[2])
            except ValueError:
                raise DataIngestionError(
                    f"non-numeric weight {row[2]!r}", path=path, row=ln,
                    column="weight",
                ) from None
            rows.append((row[0], row[1], w))
    if node_labels is None:
        seen = sorted({r[0] for r in rows} | {r[1] for r in rows})
        node_labels = seen
    labels = list(node_labels)
    index = {lab: i for i, lab in enumerate(labels)}
    edges = set()
    weights = {}
    for src, dst, w in rows:
        if src not in index or dst not in index:
            missing = src if src not in index else dst
            raise DataIngestionError(
                f"label {missing!r} is not in the node list", path=path
            )
        e = (index[src], index[dst])
        edges.add(e)
        weights[e] = w
    graph = BinaryDigraph(len(labels), frozenset(edges), tuple(labels))
    return graph, weights
