"""Synthetic benchmark: random DAGs, group variants, and SEM samples."""

from dataclasses import dataclass

import numpy as np

from ._validation import as_square_matrix
from .exceptions import InvalidArgumentError
from .graph import BinaryDigraph, is_acyclic

__all__ = [
    "SimSpec",
    "SimResult",
    "generate_backbone",
    "derive_group_graphs",
    "assign_weights",
    "sample_sem",
    "simulate",
]

GRAPH_MODELS = ("ER", "SF")
NOISE_KINDS = ("gaussian", "exponential", "gumbel")
WEIGHT_SIGNS = ("random_sign", "positive")


@dataclass
class SimSpec:
    """Full description of one synthetic scenario.

    A spec plus its ``seed`` determines every downstream artifact exactly:
    the shared backbone graph, the per-group graphs, the edge weights and
    the sampled observations.

    Parameters
    ----------
    d : int
        Number of variables (nodes).
    n : int
        Rows sampled per group.
    graph_model : {"ER", "SF"}
        Backbone family: Erdos-Renyi with a random topological orientation,
        or scale-free preferential attachment oriented by attachment order.
    mean_degree : float
        Expected mean total degree (in plus out) of the backbone.
    n_groups : int
        Number of derived group graphs.
    extra_edges : int or None
        Edges added to the backbone per group; ``None`` means 20 percent of
        the backbone edge count, rounded.
    weight_range : (float, float)
        Absolute edge weights are drawn uniformly from this interval.
    weight_sign : {"random_sign", "positive"}
        Whether each weight's sign is flipped with probability one half.
    noise : {"gaussian", "exponential", "gumbel"}
        Noise distribution; non-Gaussian choices are mean-centered.
    noise_scale : float
        Scale parameter of the noise.
    seed : int
    """

    d: int
    n: int
    graph_model: str = "ER"
    mean_degree: float = 4.0
    n_groups: int = 2
    extra_edges: int = None
    weight_range: tuple = (0.5, 2.0)
    weight_sign: str = "random_sign"
    noise: str = "gaussian"
    noise_scale: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.d < 2:
            raise InvalidArgumentError(f"d must be at least 2, got {self.d}")
        if self.n < 1:
            raise InvalidArgumentError(f"n must be at least 1, got {self.n}")
        if self.graph_model not in GRAPH_MODELS:
            raise InvalidArgumentError(
                f"graph_model must be one of {GRAPH_MODELS}, got {self.graph_model!r}"
            )
        if self.mean_degree < 0:
            raise InvalidArgumentError("mean_degree must be non-negative")
        if self.n_groups < 1:
            raise InvalidArgumentError("n_groups must be at least 1")
        if self.extra_edges is not None and self.extra_edges < 0:
            raise InvalidArgumentError("extra_edges must be non-negative")
        low, high = self.weight_range
        if not (0 <= low <= high):
            raise InvalidArgumentError(
                f"weight_range must satisfy 0 <= low <= high, got {self.weight_range!r}"
            )
        if self.weight_sign not in WEIGHT_SIGNS:
            raise InvalidArgumentError(
                f"weight_sign must be one of {WEIGHT_SIGNS}, got {self.weight_sign!r}"
            )
        if self.noise not in NOISE_KINDS:
            raise InvalidArgumentError(
                f"noise must be one of {NOISE_KINDS}, got {self.noise!r}"
            )
        if self.noise_scale <= 0:
            raise InvalidArgumentError("noise_scale must be positive")


@dataclass
class SimResult:
    """Everything produced by :func:`simulate` for one spec."""

    spec: SimSpec
    backbone: BinaryDigraph
    graphs: tuple
    weights: tuple
    datasets: tuple


def _rng_from(seed_or_rng):
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    # Philox is counter-based, so seeded streams are independent and the
    # draw order below fixes the artifacts exactly.
    return np.random.Generator(np.random.Philox(key=int(seed_or_rng)))


def generate_backbone(spec, rng=None):
    """Random DAG backbone for a scenario.

    Erdos-Renyi: each unordered pair becomes an edge independently with
    probability ``mean_degree / (d - 1)`` (so the expected edge count is
    ``mean_degree * d / 2``), oriented along a uniformly random topological
    order.  Scale-free: preferential attachment adding
    ``round(mean_degree / 2)`` edges per new node, oriented from the
    existing node to the newly attached one.

    Returns an acyclic :class:`BinaryDigraph`.
    """
    rng = _rng_from(spec.seed if rng is None else rng)
    d = spec.d
    if spec.graph_model == "ER":
        perm = rng.permutation(d)
        p_edge = min(spec.mean_degree / (d - 1), 1.0)
        U = rng.random((d, d))
        edges = set()
        for i in range(d):
            for j in range(i + 1, d):
                if U[i, j] < p_edge:
                    edges.add((int(perm[i]), int(perm[j])))
        return BinaryDigraph(d, frozenset(edges))
    # Scale-free preferential attachment.
    m = int(round(spec.mean_degree / 2.0))
    if m == 0:
        return BinaryDigraph(d, frozenset())
    m = min(m, d - 1)
    repeated = []
    targets = list(range(m))
    edges = set()
    for v in range(m, d):
        chosen = set()
        while len(chosen) < min(m, len(set(targets))):
            chosen.add(targets[int(rng.integers(len(targets)))])
        for u in sorted(chosen):
            edges.add((int(u), int(v)))
        repeated.extend(sorted(chosen))
        repeated.extend([v] * m)
        targets = repeated
    return BinaryDigraph(d, frozenset(edges))


def derive_group_graphs(backbone, spec, rng=None):
    """Per-group graphs: the backbone plus random extra edges.

    Extra edges are sampled uniformly without replacement from the node
    pairs absent from the backbone and compatible with one fixed
    topological order of it, so each group graph is acyclic by construction
    and contains the backbone.

    Returns a tuple of ``spec.n_groups`` graphs.
    """
    rng = _rng_from(spec.seed if rng is None else rng)
    acyclic, order = is_acyclic(backbone)
    if not acyclic:
        raise InvalidArgumentError("backbone must be acyclic")
    pos = {v: i for i, v in enumerate(order)}
    candidates = sorted(
        (u, v)
        for u in range(backbone.d)
        for v in range(backbone.d)
        if u != v and pos[u] < pos[v] and (u, v) not in backbone.edges
    )
    n_extra = spec.extra_edges
    if n_extra is None:
        # Default: a fifth of the backbone size, clamped to what a nearly
        # saturated backbone can still accommodate.
        n_extra = min(int(round(0.2 * backbone.n_edges)), len(candidates))
    elif n_extra > len(candidates):
        raise InvalidArgumentError(
            f"cannot add {n_extra} extra edges; only {len(candidates)} "
            "candidate pairs preserve the backbone's topological order"
        )
    graphs = []
    for _ in range(spec.n_groups):
        pick = rng.choice(len(candidates), size=n_extra, replace=False)
        extra = {candidates[i] for i in np.sort(pick)}
        graphs.append(
            BinaryDigraph(
                backbone.d,
                frozenset(backbone.edges | extra),
                backbone.node_labels,
            )
        )
    return tuple(graphs)


def assign_weights(graph, spec, rng=None):
    """Weighted adjacency matrix for a binary graph.

    Absolute weights are uniform on ``spec.weight_range`` and, under
    ``random_sign``, each sign is flipped independently with probability
    one half.  Edges are processed in sorted order so the draw sequence is
    reproducible.
    """
    rng = _rng_from(spec.seed if rng is None else rng)
    low, high = spec.weight_range
    W = np.zeros((graph.d, graph.d))
    edges = graph.sorted_edges()
    magnitudes = rng.uniform(low, high, size=len(edges))
    if spec.weight_sign == "random_sign":
        flips = rng.random(len(edges)) < 0.5
        signs = np.where(flips, -1.0, 1.0)
    else:
        signs = np.ones(len(edges))
    for (i, j), mag, sign in zip(edges, magnitudes, signs):
        W[i, j] = sign * mag
    return W


def _noise_matrix(kind, scale, shape, rng):
    if kind == "gaussian":
        return rng.normal(0.0, scale, size=shape)
    if kind == "exponential":
        # Exponential with mean `scale`, centered to mean zero.
        return rng.exponential(scale, size=shape) - scale
    # Gumbel with location chosen so the mean is zero.
    return rng.gumbel(-np.euler_gamma * scale, scale, size=shape)


def sample_sem(W, n, noise="gaussian", noise_scale=1.0, seed=0):
    """Sample rows from the linear structural model defined by ``W``.

    Each variable equals the weighted sum of its parents plus independent
    noise; columns are filled in a topological order of the support so no
    matrix inversion is needed.

    Parameters
    ----------
    W : ndarray of shape (d, d)
        Weighted adjacency matrix with acyclic support; entry (i, j) is the
        effect of variable i on variable j.
    n : int
        Number of rows.
    noise : {"gaussian", "exponential", "gumbel"}
    noise_scale : float
    seed : int or numpy.random.Generator

    Returns
    -------
    ndarray of shape (n, d)
        Uncentered samples.
    """
    W = as_square_matrix(W)
    if n < 1:
        raise InvalidArgumentError(f"n must be at least 1, got {n}")
    if noise not in NOISE_KINDS:
        raise InvalidArgumentError(
            f"noise must be one of {NOISE_KINDS}, got {noise!r}"
        )
    if noise_scale <= 0:
        raise InvalidArgumentError("noise_scale must be positive")
    d = W.shape[0]
    support = BinaryDigraph(
        d,
        frozenset(
            (i, j) for i in range(d) for j in range(d) if i != j and W[i, j] != 0.0
        ),
    ) if d > 1 else BinaryDigraph(d, frozenset())
    if np.any(np.diag(W) != 0.0):
        raise InvalidArgumentError("W has a nonzero diagonal entry (self-loop)")
    acyclic, order = is_acyclic(support)
    if not acyclic:
        raise InvalidArgumentError("the support of W contains a cycle")
    rng = _rng_from(seed)
    eps = _noise_matrix(noise, noise_scale, (n, d), rng)
    X = np.zeros((n, d))
    for j in order:
        X[:, j] = X @ W[:, j] + eps[:, j]
    return X


def simulate(spec):
    """Run the full generation pipeline for one spec.

    One counter-based random stream, seeded by ``spec.seed``, is consumed
    in a fixed order (backbone, group graphs, weights, samples), so the
    result is an exact function of the spec.

    Returns
    -------
    SimResult
        Backbone graph, per-group graphs, per-group weight matrices, and
        per-group uncentered sample matrices of shape (n, d).
    """
    rng = _rng_from(spec.seed)
    backbone = generate_backbone(spec, rng=rng)
    graphs = derive_group_graphs(backbone, spec, rng=rng)
    weights = tuple(assign_weights(g, spec, rng=rng) for g in graphs)
    datasets = tuple(
        sample_sem(W, spec.n, spec.noise, spec.noise_scale, seed=rng)
        for W in weights
    )
    return SimResult(spec, backbone, graphs, weights, datasets)
