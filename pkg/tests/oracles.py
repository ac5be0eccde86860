"""Independent reference implementations used to check the package.

Everything here is deliberately written the slow, obvious way (explicit
loops, truncated series, grid search, dense recursions) and shares no code
with ``jointdag``.  Tests compare the fast implementations against these.
"""

import math
from collections import deque

import numpy as np


# ---------------------------------------------------------------------------
# matrix exponential and acyclicity


def expm_series(A):
    """Matrix exponential by scaling and squaring over the plain Taylor series.

    Scales A down until its 1-norm is at most 0.5, sums the series until the
    terms vanish in double precision, then squares back.
    """
    A = np.asarray(A, dtype=np.float64)
    norm = float(np.abs(A).sum(axis=0).max()) if A.size else 0.0
    s = max(0, int(math.ceil(math.log2(norm / 0.5))) if norm > 0.5 else 0)
    B = A / (2.0 ** s)
    E = np.eye(A.shape[0])
    term = np.eye(A.shape[0])
    for m in range(1, 60):
        term = term @ B / m
        E = E + term
        if float(np.abs(term).max()) < 1e-18:
            break
    for _ in range(s):
        E = E @ E
    return E


def has_cycle(adj):
    """Depth-first search cycle detection on a 0/1 adjacency matrix."""
    d = adj.shape[0]
    WHITE, GRAY, BLACK = 0, 1, 2
    color = [WHITE] * d

    def visit(v):
        color[v] = GRAY
        for u in range(d):
            if adj[v, u]:
                if color[u] == GRAY:
                    return True
                if color[u] == WHITE and visit(u):
                    return True
        color[v] = BLACK
        return False

    for v in range(d):
        if color[v] == WHITE and visit(v):
            return True
    return False


def central_difference(f, x, h=1e-5):
    """Elementwise central finite differences of a scalar function."""
    x = np.asarray(x, dtype=np.float64)
    grad = np.zeros_like(x)
    it = np.nditer(x, flags=["multi_index"])
    while not it.finished:
        idx = it.multi_index
        xp = x.copy()
        xm = x.copy()
        xp[idx] += h
        xm[idx] -= h
        grad[idx] = (f(xp) - f(xm)) / (2.0 * h)
        it.iternext()
    return grad


# ---------------------------------------------------------------------------
# scalar coordinate subproblem


def grid_min_scalar(a, b, c, lam, lo=-10.0, hi=10.0, step=1e-4):
    """Brute-force minimizer of ``b z + a z^2 / 2 + lam |c + z|`` over a grid."""
    z = np.arange(lo, hi + step / 2, step)
    q = b * z + 0.5 * a * z * z + lam * np.abs(c + z)
    return float(z[int(np.argmin(q))])


# ---------------------------------------------------------------------------
# structure-recovery counts


def classify_pairs(est_edges, tru_edges):
    """Confusion counts by walking every ordered pair once.

    Returns a dict with tp, reversed, fp, extra, missing, n_predicted and
    n_true, computed directly from the definitions: a true positive is a
    directed match; a reversal is an estimated edge whose reverse (and only
    its reverse) is true; a false positive has no skeleton support; extra
    and missing compare undirected skeletons.
    """
    est = set(est_edges)
    tru = set(tru_edges)
    tp = rev = fp = 0
    for (i, j) in est:
        if (i, j) in tru:
            tp += 1
        elif (j, i) in tru:
            rev += 1
        else:
            fp += 1
    est_skel = {frozenset(e) for e in est}
    tru_skel = {frozenset(e) for e in tru}
    extra = len(est_skel - tru_skel)
    missing = len(tru_skel - est_skel)
    return {
        "tp": tp,
        "reversed": rev,
        "fp": fp,
        "extra": extra,
        "missing": missing,
        "n_predicted": len(est),
        "n_true": len(tru),
    }


# ---------------------------------------------------------------------------
# graph measures, all by explicit enumeration


def bfs_distances(adj):
    """All-pairs shortest hop counts; math.inf where unreachable."""
    d = adj.shape[0]
    dist = [[math.inf] * d for _ in range(d)]
    for s in range(d):
        dist[s][s] = 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            for u in range(d):
                if adj[v][u] and dist[s][u] == math.inf:
                    dist[s][u] = dist[s][v] + 1
                    queue.append(u)
    return dist


def global_efficiency_ref(adj):
    d = adj.shape[0]
    if d < 2:
        return 0.0
    dist = bfs_distances(adj)
    total = 0.0
    for i in range(d):
        for j in range(d):
            if i != j and dist[i][j] != math.inf:
                total += 1.0 / dist[i][j]
    return total / (d * (d - 1))


def local_efficiency_ref(adj):
    d = adj.shape[0]
    per_node = []
    for v in range(d):
        nbrs = [u for u in range(d) if u != v and (adj[v][u] or adj[u][v])]
        if len(nbrs) < 2:
            per_node.append(0.0)
            continue
        sub = adj[np.ix_(nbrs, nbrs)]
        per_node.append(global_efficiency_ref(sub))
    return per_node, sum(per_node) / d


def clustering_ref(adj):
    """Directed clustering by triple enumeration.

    For each node v, counts the directed triangles through v as half the
    number of ordered neighbor pairs (j, h) with a link between j and h in
    either direction, weighting each of the three link slots by the number
    of directions present.  Returns (per-node list, mean, transitivity).
    """
    d = adj.shape[0]
    tri = [0.0] * d
    denom = [0.0] * d
    for v in range(d):
        t = 0.0
        for j in range(d):
            for h in range(d):
                t += (
                    (adj[v][j] + adj[j][v])
                    * (adj[v][h] + adj[h][v])
                    * (adj[j][h] + adj[h][j])
                )
        tri[v] = t / 2.0
        k_tot = sum(adj[v][u] for u in range(d)) + sum(adj[u][v] for u in range(d))
        recip = sum(1 for u in range(d) if adj[v][u] and adj[u][v])
        denom[v] = k_tot * (k_tot - 1) - 2.0 * recip
    per_node = [tri[v] / denom[v] if denom[v] > 0 else 0.0 for v in range(d)]
    denom_sum = sum(denom)
    transitivity = sum(tri) / denom_sum if denom_sum > 0 else 0.0
    return per_node, sum(per_node) / d, transitivity


def _pearson_ref(xs, ys):
    n = len(xs)
    mx = sum(xs) / n
    my = sum(ys) / n
    sx = math.sqrt(sum((x - mx) ** 2 for x in xs) / n)
    sy = math.sqrt(sum((y - my) ** 2 for y in ys) / n)
    if sx == 0.0 or sy == 0.0:
        return 0.0
    cov = sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / n
    return cov / (sx * sy)


def assortativity_ref(adj):
    d = adj.shape[0]
    indeg = [sum(adj[u][v] for u in range(d)) for v in range(d)]
    outdeg = [sum(adj[v][u] for u in range(d)) for v in range(d)]
    edges = sorted((i, j) for i in range(d) for j in range(d) if adj[i][j])
    if len(edges) < 2:
        return math.nan
    combos = [
        ([outdeg[i] for i, _ in edges], [indeg[j] for _, j in edges]),
        ([indeg[i] for i, _ in edges], [outdeg[j] for _, j in edges]),
        ([outdeg[i] for i, _ in edges], [outdeg[j] for _, j in edges]),
        ([indeg[i] for i, _ in edges], [indeg[j] for _, j in edges]),
    ]
    return sum(_pearson_ref(xs, ys) for xs, ys in combos) / 4.0


def rich_club_ref(adj):
    """Rich-club coefficients per level, and their maximum.

    Returns (dict level -> coefficient, max or nan).
    """
    d = adj.shape[0]
    sumdeg = [
        sum(adj[u][v] for u in range(d)) + sum(adj[v][u] for u in range(d))
        for v in range(d)
    ]
    max_deg = max(sumdeg) if d else 0
    levels = {}
    for k in range(1, max_deg):
        nodes = [v for v in range(d) if sumdeg[v] > k]
        if len(nodes) < 2:
            continue
        e = sum(adj[i][j] for i in nodes for j in nodes if i != j)
        levels[k] = e / (len(nodes) * (len(nodes) - 1))
    best = max(levels.values()) if levels else math.nan
    return levels, best


def hubs_ref(adj, ddof=0):
    """In/out/sum hub node indices via direct mean + 3 sd thresholds."""
    d = adj.shape[0]
    indeg = [sum(adj[u][v] for u in range(d)) for v in range(d)]
    outdeg = [sum(adj[v][u] for u in range(d)) for v in range(d)]
    sumdeg = [indeg[v] + outdeg[v] for v in range(d)]

    def hubs(deg):
        mean = sum(deg) / d
        div = d - ddof
        sd = math.sqrt(sum((x - mean) ** 2 for x in deg) / div)
        return [v for v in range(d) if deg[v] > mean + 3.0 * sd]

    hin, hout = hubs(indeg), hubs(outdeg)
    hsum = [v for v in hubs(sumdeg) if v not in hin and v not in hout]
    return hin, hout, hsum


def undirected_clustering_ref(adj):
    """Plain undirected clustering of the skeleton (triangles over wedges)."""
    d = adj.shape[0]
    und = ((adj + adj.T) > 0).astype(int)
    per_node = []
    for v in range(d):
        nbrs = [u for u in range(d) if und[v][u]]
        k = len(nbrs)
        if k < 2:
            per_node.append(0.0)
            continue
        links = sum(
            und[a][b] for ai, a in enumerate(nbrs) for b in nbrs[ai + 1:]
        )
        per_node.append(2.0 * links / (k * (k - 1)))
    return per_node


# ---------------------------------------------------------------------------
# quasi-Newton recursions, dense


def dense_bfgs_matrix(s_list, y_list, n):
    """Hessian approximation from the BFGS update recursion.

    Starts from ``sigma I`` with ``sigma = y.y / s.y`` of the newest pair
    (identity when no pairs) and applies the rank-two update once per pair
    in storage order.  This is the dense counterpart of the compact form.
    """
    if not s_list:
        return np.eye(n)
    sigma = float(np.dot(y_list[-1], y_list[-1])) / float(
        np.dot(s_list[-1], y_list[-1])
    )
    B = sigma * np.eye(n)
    for s, y in zip(s_list, y_list):
        Bs = B @ s
        B = B - np.outer(Bs, Bs) / float(s @ Bs) + np.outer(y, y) / float(y @ s)
    return B


def dense_inverse_bfgs_apply(s_list, y_list, grad):
    """``H @ grad`` with H from the inverse-BFGS recursion.

    Starts from ``gamma I`` with ``gamma = s.y / y.y`` of the newest pair and
    applies the standard inverse update per pair in storage order.
    """
    n = grad.shape[0]
    if not s_list:
        return grad.copy()
    gamma = float(np.dot(s_list[-1], y_list[-1])) / float(
        np.dot(y_list[-1], y_list[-1])
    )
    H = gamma * np.eye(n)
    for s, y in zip(s_list, y_list):
        rho = 1.0 / float(np.dot(y, s))
        V = np.eye(n) - rho * np.outer(s, y)
        H = V @ H @ V.T + rho * np.outer(s, s)
    return H @ grad


def cd_direction_dense(B, grad, w, lam1, active, max_sweeps, tol, rel_stop):
    """Coordinate-descent direction with a dense Hessian.

    Mirrors the production sweep logic (same update formula, same stopping
    rule) but tracks ``B @ d`` by full dense products, so it checks the
    incremental bookkeeping rather than the truncation policy.
    """
    p = grad.shape[0]
    d_vec = np.zeros(p)
    stop = tol
    for sweep in range(1, max_sweeps + 1):
        max_step = 0.0
        for j in active:
            a = max(B[j, j], 1e-10)
            b = grad[j] + float(B[j] @ d_vec)
            c = w[j] + d_vec[j]
            x = c - b / a
            thr = lam1 / a
            if x > thr:
                tstar = x - thr
            elif x < -thr:
                tstar = x + thr
            else:
                tstar = 0.0
            z = tstar - c
            if z != 0.0:
                d_vec[j] += z
                max_step = max(max_step, abs(z))
        if sweep == 1:
            stop = max(stop, rel_stop * max_step)
        if max_step <= stop:
            break
    return d_vec


# ---------------------------------------------------------------------------
# least squares


def ols_columns(X, support):
    """Per-column ordinary least squares on a fixed parent mask."""
    n, d = X.shape
    W = np.zeros((d, d))
    for j in range(d):
        parents = [i for i in range(d) if support[i, j]]
        if not parents:
            continue
        coef, *_ = np.linalg.lstsq(X[:, parents], X[:, j], rcond=None)
        W[parents, j] = coef
    return W


# ---------------------------------------------------------------------------
# random test-case generators


def random_weight_matrix(rng, d, density=0.35, low=0.8, high=2.0):
    """Random weights with |entries| bounded away from zero.

    The magnitude floor keeps the acyclicity value of a cyclic support well
    above numerical noise, so classification against the DFS oracle is
    unambiguous.
    """
    mask = rng.random((d, d)) < density
    np.fill_diagonal(mask, False)
    mag = rng.uniform(low, high, size=(d, d))
    sign = np.where(rng.random((d, d)) < 0.5, -1.0, 1.0)
    return np.where(mask, sign * mag, 0.0)


def random_dag_matrix(rng, d, density=0.4, low=0.5, high=2.0):
    """Random acyclic weights: strict triangular under a random node order."""
    W = np.zeros((d, d))
    perm = rng.permutation(d)
    for a in range(d):
        for b in range(a + 1, d):
            if rng.random() < density:
                sign = -1.0 if rng.random() < 0.5 else 1.0
                W[perm[a], perm[b]] = sign * rng.uniform(low, high)
    return W


def random_digraph_edges(rng, d, density=0.25):
    """Random directed edge set (cycles allowed, no self-loops)."""
    return frozenset(
        (i, j)
        for i in range(d)
        for j in range(d)
        if i != j and rng.random() < density
    )
