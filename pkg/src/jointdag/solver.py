"""Augmented-Lagrangian solver for joint acyclicity-constrained estimation.

The estimation problem is: minimize the grouped squared loss plus sparsity
and group-coupling penalties, subject to every group matrix having an
acyclic support.  The acyclicity constraints enter through an augmented
Lagrangian (quadratic penalty weight ``rho`` plus per-group multipliers
``alpha_k``) whose smooth part is minimized by L-BFGS when the L1 weight is
zero and by a proximal quasi-Newton method otherwise.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from numba import njit

from .acyclicity import _value_and_gradient, acyclicity_value
from .exceptions import InvalidArgumentError, SolverDivergenceError
from .objective import PenaltyParams, group_penalty, sem_loss

__all__ = [
    "SolverConfig",
    "SolverState",
    "TraceRecord",
    "fit_joint",
    "minimize_smooth",
    "lbfgs_two_loop",
    "LbfgsHessian",
    "select_active_set",
    "pqn_direction",
]

# Line-search and curvature constants (fixed, not configurable).
ARMIJO_C1 = 1e-4
ARMIJO_SHRINK = 0.5
WOLFE_C2 = 0.9
CURVATURE_SKIP_TOL = 1e-10
HESSIAN_DIAG_FLOOR = 1e-10
INNER_GRAD_TOL = 1e-6
# The direction subproblem is solved inexactly: a capped number of sweeps
# with a scale-free relative stop.  Directions stay descent directions (the
# caller checks the model decrease), and two digits of subproblem accuracy
# buy nothing once the line search and outer loop truncate anyway.
CD_MAX_SWEEPS = 20
CD_RELATIVE_STOP = 1e-2


@dataclass
class SolverConfig:
    """Solver settings.

    Defaults follow the standard escalation schedule for this family of
    methods: start the quadratic penalty at 1, multiply by 10 whenever the
    worst constraint violation fails to shrink to a quarter of its previous
    value, and stop once the violation falls below ``h_tol`` or ``rho``
    hits ``rho_max``.
    """

    penalty: PenaltyParams = field(default_factory=PenaltyParams)
    rho_init: float = 1.0
    rho_mult: float = 10.0
    rho_max: float = 1e16
    h_tol: float = 1e-8
    max_outer_iters: int = 100
    inner_max_iters: int = 500
    lbfgs_memory: int = 10
    progress_factor: float = 0.25
    threshold_omega: float = 0.3
    use_active_set: bool = True

    def __post_init__(self):
        if not isinstance(self.penalty, PenaltyParams):
            self.penalty = PenaltyParams(**self.penalty)
        if self.rho_init <= 0:
            raise InvalidArgumentError(f"rho_init must be positive, got {self.rho_init!r}")
        if self.rho_mult <= 1:
            raise InvalidArgumentError(f"rho_mult must exceed 1, got {self.rho_mult!r}")
        if self.rho_max < self.rho_init:
            raise InvalidArgumentError("rho_max must be at least rho_init")
        if self.h_tol <= 0:
            raise InvalidArgumentError(f"h_tol must be positive, got {self.h_tol!r}")
        if self.max_outer_iters < 1 or self.inner_max_iters < 1:
            raise InvalidArgumentError("iteration limits must be at least 1")
        if self.lbfgs_memory < 1:
            raise InvalidArgumentError("lbfgs_memory must be at least 1")
        if not 0 < self.progress_factor < 1:
            raise InvalidArgumentError(
                f"progress_factor must be in (0, 1), got {self.progress_factor!r}"
            )
        if self.threshold_omega < 0:
            raise InvalidArgumentError("threshold_omega must be non-negative")


@dataclass(frozen=True)
class TraceRecord:
    """One outer-iteration diagnostic line."""

    outer_iter: int
    objective: float
    max_h: float
    rho: float
    inner_iterations: int


@dataclass
class SolverState:
    """Result of :func:`fit_joint` beyond the weight stack itself."""

    W: np.ndarray
    alphas: np.ndarray
    rho: float
    outer_iter: int
    h_values: np.ndarray
    trace: tuple
    converged: bool
    message: str

    @property
    def max_h(self):
        return float(np.max(self.h_values))


def lbfgs_two_loop(grad, s_list, y_list):
    """Apply the L-BFGS inverse-Hessian approximation to a vector.

    Standard two-loop recursion over the stored (s, y) curvature pairs with
    initial scaling ``H0 = (s.y / y.y) I`` taken from the most recent pair.
    With no pairs stored this is the identity.

    Returns ``H @ grad``.
    """
    q = np.array(grad, dtype=np.float64, copy=True)
    m = len(s_list)
    if m == 0:
        return q
    rhos = np.empty(m)
    alphas = np.empty(m)
    for i in range(m - 1, -1, -1):
        rhos[i] = 1.0 / float(np.dot(y_list[i], s_list[i]))
        alphas[i] = rhos[i] * float(np.dot(s_list[i], q))
        q -= alphas[i] * y_list[i]
    gamma = float(np.dot(s_list[-1], y_list[-1])) / float(
        np.dot(y_list[-1], y_list[-1])
    )
    r = gamma * q
    for i in range(m):
        beta = rhos[i] * float(np.dot(y_list[i], r))
        r += (alphas[i] - beta) * s_list[i]
    return r


def _strong_wolfe(fun, w, f0, g0, direction, max_evals=30):
    """Strong-Wolfe line search (bracket then zoom).

    Returns (step, w_new, f_new, g_new, ok).  ``ok`` is true when a point
    satisfying at least the sufficient-decrease condition was found; the
    curvature condition may be relaxed if the zoom interval collapses.
    Non-finite trial values are treated as overshoots and shrink the
    bracket, which is how objective overflow is absorbed.
    """
    dphi0 = float(np.dot(g0, direction))
    if not np.isfinite(dphi0) or dphi0 >= 0:
        return 0.0, w, f0, g0, False

    evals = [0]

    def phi(a):
        evals[0] += 1
        wa = w + a * direction
        fa, ga = fun(wa)
        if np.all(np.isfinite(ga)):
            dphia = float(np.dot(ga, direction))
        else:
            dphia = np.nan
        return wa, fa, dphia, ga

    def zoom(a_lo, f_lo, dphi_lo, pt_lo, a_hi, f_hi):
        while evals[0] < max_evals:
            span = a_hi - a_lo
            if abs(span) <= 1e-14 * max(1.0, abs(a_lo)):
                break
            # Quadratic interpolation using the low endpoint's slope,
            # safeguarded toward bisection.
            a = a_lo
            denom = 2.0 * (f_hi - f_lo - dphi_lo * span)
            if np.isfinite(f_hi) and denom != 0.0:
                a = a_lo - dphi_lo * span * span / denom
            lo, hi = (a_lo, a_hi) if a_lo < a_hi else (a_hi, a_lo)
            margin = 0.1 * (hi - lo)
            if not np.isfinite(a) or a < lo + margin or a > hi - margin:
                a = a_lo + 0.5 * span
            wa, fa, dphia, ga = phi(a)
            if not np.isfinite(fa) or fa > f0 + ARMIJO_C1 * a * dphi0 or fa >= f_lo:
                a_hi, f_hi = a, fa
            else:
                if abs(dphia) <= -WOLFE_C2 * dphi0:
                    return a, wa, fa, ga, True
                if dphia * (a_hi - a_lo) >= 0:
                    a_hi, f_hi = a_lo, f_lo
                a_lo, f_lo, dphi_lo, pt_lo = a, fa, dphia, (wa, ga)
        if a_lo > 0.0 and pt_lo is not None:
            wa, ga = pt_lo
            return a_lo, wa, f_lo, ga, True
        return 0.0, w, f0, g0, False

    a_prev, f_prev, dphi_prev = 0.0, f0, dphi0
    pt_prev = None
    a = 1.0
    while evals[0] < max_evals:
        wa, fa, dphia, ga = phi(a)
        if not np.isfinite(fa) or fa > f0 + ARMIJO_C1 * a * dphi0 or (
            pt_prev is not None and fa >= f_prev
        ):
            return zoom(a_prev, f_prev, dphi_prev, pt_prev, a, fa)
        if abs(dphia) <= -WOLFE_C2 * dphi0:
            return a, wa, fa, ga, True
        if dphia >= 0:
            return zoom(a, fa, dphia, (wa, ga), a_prev, f_prev)
        a_prev, f_prev, dphi_prev, pt_prev = a, fa, dphia, (wa, ga)
        a *= 2.0
        if a > 1e10:
            break
    if pt_prev is not None:
        wa, ga = pt_prev
        return a_prev, wa, f_prev, ga, True
    return 0.0, w, f0, g0, False


def _lbfgs_minimize(fun, w0, memory, max_iters, grad_tol):
    """Minimize a smooth function with limited-memory BFGS.

    Stops when the gradient infinity norm falls below ``grad_tol``, the
    iteration limit is reached, or the line search stalls.  Returns
    (w, f, g, iterations, message).
    """
    w = np.array(w0, dtype=np.float64, copy=True)
    f, g = fun(w)
    if not np.isfinite(f):
        raise SolverDivergenceError("objective is non-finite at the inner start point")
    s_hist, y_hist = [], []
    n_iter = 0
    message = "iteration limit reached"
    while n_iter < max_iters:
        if float(np.max(np.abs(g))) <= grad_tol:
            message = "gradient tolerance reached"
            break
        direction = -lbfgs_two_loop(g, s_hist, y_hist)
        if float(np.dot(direction, g)) >= 0.0:
            # Curvature information went bad; restart from steepest descent.
            s_hist.clear()
            y_hist.clear()
            direction = -g
        step, w_new, f_new, g_new, ok = _strong_wolfe(fun, w, f, g, direction)
        if not ok or step == 0.0:
            message = "line search stalled"
            break
        n_iter += 1
        s = w_new - w
        y = g_new - g
        if float(np.dot(s, y)) > CURVATURE_SKIP_TOL:
            s_hist.append(s)
            y_hist.append(y)
            if len(s_hist) > memory:
                s_hist.pop(0)
                y_hist.pop(0)
        decrease = f - f_new
        w, f, g = w_new, f_new, g_new
        if 0.0 <= decrease <= 1e-13 * max(1.0, abs(f)):
            message = "function decrease below floor"
            break
    return w, f, g, n_iter, message


class LbfgsHessian:
    """Compact-form L-BFGS approximation of the Hessian.

    Represents ``B = sigma * I - Psi @ Minv @ Psi.T`` built from the stored
    curvature pairs, where ``Psi = [sigma * S, Y]`` and ``M`` is the usual
    2m-by-2m block matrix.  With no pairs stored, ``B`` is the identity.
    The per-row products needed by coordinate descent (``B[j, j]`` and
    incremental ``(B d)_j``) cost O(m) each.
    """

    def __init__(self, s_list, y_list, n):
        m = len(s_list)
        self.n = n
        if m == 0:
            self._scaled_identity(1.0)
            return
        S = np.stack(s_list, axis=1)
        Y = np.stack(y_list, axis=1)
        sy_last = float(np.dot(s_list[-1], y_list[-1]))
        yy_last = float(np.dot(y_list[-1], y_list[-1]))
        sigma = yy_last / sy_last
        SY = S.T @ Y
        Lmat = np.tril(SY, k=-1)
        M = np.empty((2 * m, 2 * m))
        M[:m, :m] = sigma * (S.T @ S)
        M[:m, m:] = Lmat
        M[m:, :m] = Lmat.T
        M[m:, m:] = 0.0
        M[m:, m:][np.diag_indices(m)] = -np.diag(SY)
        # Reject a numerically singular middle matrix up front so users of
        # rows()/diag()/dot() never hit LinAlgError mid-iteration.  The
        # zero-pivot warning is silenced because that exact condition is
        # what the fallback below handles.
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
                lu, piv = scipy.linalg.lu_factor(M.T)
        except (np.linalg.LinAlgError, ValueError):
            self._scaled_identity(sigma)
            return
        if not np.all(np.isfinite(lu)) or np.min(np.abs(np.diag(lu))) == 0.0:
            self._scaled_identity(sigma)
            return
        self.sigma = sigma
        self.psi = np.concatenate([sigma * S, Y], axis=1)
        self._lu_piv = (lu, piv)
        self._M = M

    def _scaled_identity(self, sigma):
        self.sigma = sigma
        self.psi = np.zeros((self.n, 0))
        self._lu_piv = None
        self._M = np.zeros((0, 0))

    def rows(self, idx):
        """Row slices of the compact form for a coordinate subset.

        Returns ``(diag_idx, psi_idx, rrows_idx)`` where ``diag_idx`` holds
        ``B[j, j]`` and ``rrows_idx ≈ (psi @ inv(M))[idx]``.  Cost scales
        with ``len(idx)``, not the full dimension.
        """
        if self.psi.shape[1] == 0:
            return (
                np.full(len(idx), self.sigma),
                np.zeros((len(idx), 0)),
                np.zeros((len(idx), 0)),
            )
        psi_idx = self.psi[idx]
        rrows_idx = scipy.linalg.lu_solve(self._lu_piv, psi_idx.T).T
        diag_idx = self.sigma - np.einsum("ij,ij->i", rrows_idx, psi_idx)
        return diag_idx, psi_idx, rrows_idx

    def diag(self):
        """Diagonal of B."""
        return self.rows(np.arange(self.n))[0]

    def dot(self, v):
        """Dense product ``B @ v`` (used for verification, not in hot paths)."""
        v = np.asarray(v, dtype=np.float64)
        if self.psi.shape[1] == 0:
            return self.sigma * v
        return self.sigma * v - self.psi @ np.linalg.solve(self._M, self.psi.T @ v)


def select_active_set(w, grad, lambda1, candidates=None):
    """Coordinates allowed to move in the direction subproblem.

    A coordinate is active when it is currently nonzero or when its
    gradient escapes the L1 subdifferential at zero (``|grad_j| > lambda1``).
    ``candidates`` restricts the search to a subset of indices (used to
    keep pinned diagonal entries out); active nonzero coordinates are never
    dropped.
    """
    w = np.asarray(w, dtype=np.float64)
    grad = np.asarray(grad, dtype=np.float64)
    if candidates is None:
        cand = np.arange(w.shape[0], dtype=np.int64)
    else:
        cand = np.asarray(candidates, dtype=np.int64)
    keep = (w[cand] != 0.0) | (np.abs(grad[cand]) > lambda1)
    return cand[keep]


@njit(cache=True, fastmath=True)
def _cd_sweeps(d_act, grad_act, w_act, a_vec, sigma, psi, rrows, v, lam1,
               max_sweeps, tol, rel_stop):
    n = d_act.shape[0]
    m2 = psi.shape[1]
    sweeps = 0
    stop = tol
    for _ in range(max_sweeps):
        sweeps += 1
        max_step = 0.0
        for i in range(n):
            bd = sigma * d_act[i]
            if m2 > 0:
                acc = 0.0
                for t in range(m2):
                    acc += rrows[i, t] * v[t]
                bd -= acc
            a = a_vec[i]
            b = grad_act[i] + bd
            c = w_act[i] + d_act[i]
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
                d_act[i] += z
                if m2 > 0:
                    for t in range(m2):
                        v[t] += z * psi[i, t]
                az = abs(z)
                if az > max_step:
                    max_step = az
        if sweeps == 1:
            rel = rel_stop * max_step
            if rel > stop:
                stop = rel
        if max_step <= stop:
            break
    return sweeps


def pqn_direction(grad, hessian, w, lambda1, active_set, tol=None):
    """L1-regularized quadratic direction subproblem, solved coordinatewise.

    Minimizes ``grad . d + 0.5 d^T B d + lambda1 |w + d|_1`` over directions
    supported on ``active_set`` by cyclic coordinate descent.  Each scalar
    update is closed form: with ``a = B_jj`` (floored at 1e-10),
    ``b = grad_j + (B d)_j`` and ``c = w_j + d_j``, the optimum is
    ``z* = -c + soft(c - b / a, lambda1 / a)`` where ``soft`` is the
    soft-threshold map ``soft(x, t) = sign(x) * max(|x| - t, 0)``.

    Parameters
    ----------
    grad : ndarray of shape (p,)
        Gradient of the smooth part at ``w``.
    hessian : LbfgsHessian
    w : ndarray of shape (p,)
        Current point.
    lambda1 : float
        Non-negative L1 weight.
    active_set : ndarray of int
        Coordinates allowed to move; all others stay zero.
    tol : float, optional
        Sweep-level stopping tolerance on the largest coordinate update.

    Returns
    -------
    ndarray of shape (p,)
        The direction, zero outside ``active_set``.
    """
    grad = np.asarray(grad, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    active = np.asarray(active_set, dtype=np.int64)
    p = grad.shape[0]
    direction = np.zeros(p)
    if active.size == 0:
        return direction
    diag_act, psi_act, rrows_act = hessian.rows(active)
    a_act = np.maximum(diag_act, HESSIAN_DIAG_FLOOR)
    psi_act = np.ascontiguousarray(psi_act)
    rrows_act = np.ascontiguousarray(rrows_act)
    v = np.zeros(hessian.psi.shape[1])
    d_act = np.zeros(active.size)
    if tol is None:
        tol = 1e-8 * max(1.0, float(np.max(np.abs(grad[active]))))
    _cd_sweeps(
        d_act,
        np.ascontiguousarray(grad[active]),
        np.ascontiguousarray(w[active]),
        a_act,
        float(hessian.sigma),
        psi_act,
        rrows_act,
        v,
        float(lambda1),
        CD_MAX_SWEEPS,
        float(tol),
        CD_RELATIVE_STOP,
    )
    direction[active] = d_act
    return direction


def _l1_optimality(w, grad, lambda1, candidates):
    """Inf-norm of the minimum-norm subgradient of the composite objective."""
    x = w[candidates]
    g = grad[candidates]
    if x.size == 0:
        return 0.0
    val = np.where(
        x > 0,
        g + lambda1,
        np.where(x < 0, g - lambda1, np.maximum(np.abs(g) - lambda1, 0.0)),
    )
    return float(np.max(np.abs(val)))


def _pqn_minimize(fun, w0, lambda1, free_idx, memory, max_iters, opt_tol,
                  use_active_set=True):
    """Proximal quasi-Newton minimization of smooth + lambda1 * L1.

    Each iteration builds the compact L-BFGS Hessian, solves the direction
    subproblem over the active set, and backtracks on the composite
    objective until the Armijo condition holds.  Returns
    (w, f, g, iterations, message).
    """
    w = np.array(w0, dtype=np.float64, copy=True)
    f, g = fun(w)
    if not np.isfinite(f):
        raise SolverDivergenceError("objective is non-finite at the inner start point")
    l1 = lambda w_: float(np.abs(w_[free_idx]).sum())
    F = f + lambda1 * l1(w)
    s_hist, y_hist = [], []
    n_iter = 0
    message = "iteration limit reached"
    while n_iter < max_iters:
        if _l1_optimality(w, g, lambda1, free_idx) <= opt_tol:
            message = "optimality tolerance reached"
            break
        if use_active_set:
            active = select_active_set(w, g, lambda1, free_idx)
        else:
            active = free_idx
        if active.size == 0:
            message = "active set is empty"
            break
        hessian = LbfgsHessian(s_hist, y_hist, w.shape[0])
        direction = pqn_direction(g, hessian, w, lambda1, active)
        if float(np.max(np.abs(direction))) <= 1e-14:
            message = "direction subproblem returned zero"
            break
        delta = float(np.dot(g, direction)) + lambda1 * (
            float(np.abs((w + direction)[free_idx]).sum()) - l1(w)
        )
        if not delta < 0.0:
            message = "no descent direction"
            break
        t = 1.0
        accepted = False
        while t >= 2.0 ** -40:
            w_t = w + t * direction
            f_t, g_t = fun(w_t)
            F_t = f_t + lambda1 * l1(w_t)
            if np.isfinite(F_t) and F_t <= F + ARMIJO_C1 * t * delta:
                accepted = True
                break
            t *= ARMIJO_SHRINK
        if not accepted:
            message = "line search stalled"
            break
        n_iter += 1
        s = w_t - w
        y = g_t - g
        if float(np.dot(s, y)) > CURVATURE_SKIP_TOL:
            s_hist.append(s)
            y_hist.append(y)
            if len(s_hist) > memory:
                s_hist.pop(0)
                y_hist.pop(0)
        decrease = F - F_t
        w, f, g, F = w_t, f_t, g_t, F_t
        if 0.0 <= decrease <= 1e-13 * max(1.0, abs(F)):
            message = "function decrease below floor"
            break
    return w, f, g, n_iter, message


def _diag_indices_flat(n_groups, d):
    idx = []
    for k in range(n_groups):
        base = k * d * d
        for i in range(d):
            idx.append(base + i * d + i)
    return np.asarray(idx, dtype=np.int64)


def _make_smooth_closure(dataset, penalty, rho_alphas, diag_flat):
    """Flat-vector view of :func:`jointdag.objective.smooth_objective`.

    Same mathematics, restated for the solver's hot loop: the squared loss
    goes through cached Gram matrices so evaluation cost is independent of
    the row counts, validation is skipped (inputs come from the solver
    itself), and diagonal gradient entries are zeroed so those coordinates
    never move.  Non-finite intermediate values collapse to ``(inf, zeros)``,
    which every line search treats as a rejected trial point.
    """
    K, d = dataset.n_groups, dataset.n_variables
    grams = dataset.grams()
    lam2 = penalty.lambda2
    eps = penalty.group_smoothing_eps
    offdiag = ~np.eye(d, dtype=bool)
    eye = np.eye(d)

    def smooth_fg(w_flat):
        if not np.all(np.isfinite(w_flat)):
            return np.inf, np.zeros_like(w_flat)
        W = w_flat.reshape(K, d, d)
        rho, alphas = rho_alphas
        value = 0.0
        grad = np.empty_like(W)
        with np.errstate(over="ignore", invalid="ignore"):
            for k in range(K):
                Wk = W[k]
                Rt = eye - Wk
                A = grams[k] @ Rt
                value += 0.5 * float(np.sum(Rt * A))
                hk, hk_grad = _value_and_gradient(Wk)
                if not np.isfinite(hk):
                    return np.inf, np.zeros_like(w_flat)
                value += (0.5 * rho * hk + alphas[k]) * hk
                grad[k] = (rho * hk + alphas[k]) * hk_grad - A
            if lam2 > 0.0:
                root = np.sqrt((W * W).sum(axis=0) + eps)
                value += lam2 * float(root[offdiag].sum())
                grad += (lam2 / root) * W
        gflat = grad.reshape(-1)
        gflat[diag_flat] = 0.0
        if not (np.isfinite(value) and np.all(np.isfinite(gflat))):
            return np.inf, np.zeros_like(w_flat)
        return value, gflat

    return smooth_fg


def minimize_smooth(dataset, config=None, rho=0.0, alphas=None, W0=None):
    """One inner L-BFGS solve of the smooth objective (requires lambda1 = 0).

    Diagonal entries are pinned to zero throughout.  Useful on its own for
    unpenalized or group-coupled fits at fixed multipliers; :func:`fit_joint`
    drives it inside the outer dual-ascent loop.

    Returns
    -------
    (W, info)
        ``W`` of shape (n_groups, d, d); ``info`` is a dict with keys
        ``iterations``, ``message``, ``objective`` and ``grad_norm``.
    """
    cfg = config if config is not None else SolverConfig()
    if cfg.penalty.lambda1 != 0.0:
        raise InvalidArgumentError(
            "minimize_smooth requires lambda1 = 0; use fit_joint for L1 fits"
        )
    K, d = dataset.n_groups, dataset.n_variables
    if alphas is None:
        alphas = np.zeros(K)
    alphas = np.asarray(alphas, dtype=np.float64)
    diag_flat = _diag_indices_flat(K, d)
    fun = _make_smooth_closure(dataset, cfg.penalty, (float(rho), alphas), diag_flat)
    if W0 is None:
        w0 = np.zeros(K * d * d)
    else:
        from ._validation import as_weight_stack

        w0 = as_weight_stack(W0, K, d).reshape(-1).copy()
        w0[diag_flat] = 0.0
    w, f, g, iters, message = _lbfgs_minimize(
        fun, w0, cfg.lbfgs_memory, cfg.inner_max_iters, INNER_GRAD_TOL
    )
    info = {
        "iterations": iters,
        "message": message,
        "objective": f,
        "grad_norm": float(np.max(np.abs(g))),
    }
    return w.reshape(K, d, d).copy(), info


def fit_joint(dataset, config=None, seed=0):
    """Jointly fit one weighted adjacency matrix per group.

    Runs the augmented-Lagrangian outer loop from a zero start: each outer
    iteration minimizes the smooth part (plus the L1 term, handled
    proximally when ``lambda1 > 0``), then performs the dual-ascent update
    ``alpha_k += rho * h(W_k)``.  Whenever the worst constraint violation
    fails to shrink below ``progress_factor`` times its previous value, the
    quadratic weight is escalated (``rho *= rho_mult``, capped at
    ``rho_max``) and the inner solve is repeated.

    Parameters
    ----------
    dataset : GroupedDataset
    config : SolverConfig, optional
    seed : int
        Recorded for reproducibility metadata.  The fit starts from zero
        and consumes no randomness, so the result does not depend on it.

    Returns
    -------
    (W, state)
        ``W`` of shape (n_groups, d, d) with exactly zero diagonals, and a
        :class:`SolverState`.  When the constraint tolerance was not
        reached before ``rho_max``, the returned iterate is the best one
        seen (smallest worst-group violation) and ``state.converged`` is
        false.

    Raises
    ------
    SolverDivergenceError
        If the objective becomes non-finite at an accepted iterate.  The
        partial trace is attached to the exception.
    """
    cfg = config if config is not None else SolverConfig()
    K, d = dataset.n_groups, dataset.n_variables
    p = K * d * d
    diag_flat = _diag_indices_flat(K, d)
    free_idx = np.setdiff1d(np.arange(p, dtype=np.int64), diag_flat)
    lam1 = cfg.penalty.lambda1

    rho = cfg.rho_init
    alphas = np.zeros(K)
    rho_alphas = [rho, alphas]
    fun = _make_smooth_closure(dataset, cfg.penalty, rho_alphas, diag_flat)

    w = np.zeros(p)
    h_prev = np.inf
    trace = []
    converged = False
    message = "outer iteration limit reached"
    best = {"w": w.copy(), "h_vec": np.zeros(K), "max_h": np.inf,
            "objective": np.inf, "alphas": alphas.copy()}
    outer = 0
    h_new = np.zeros(K)

    for outer in range(1, cfg.max_outer_iters + 1):
        inner_total = 0
        while True:
            rho_alphas[0] = rho
            rho_alphas[1] = alphas
            if lam1 == 0.0:
                w_new, _, _, n_inner, _ = _lbfgs_minimize(
                    fun, w, cfg.lbfgs_memory, cfg.inner_max_iters, INNER_GRAD_TOL
                )
            else:
                w_new, _, _, n_inner, _ = _pqn_minimize(
                    fun, w, lam1, free_idx, cfg.lbfgs_memory,
                    cfg.inner_max_iters, INNER_GRAD_TOL,
                    use_active_set=cfg.use_active_set,
                )
            inner_total += n_inner
            Wn = w_new.reshape(K, d, d)
            h_new = np.array([acyclicity_value(Wn[k]) for k in range(K)])
            max_h = float(h_new.max())
            if max_h > cfg.progress_factor * h_prev and rho < cfg.rho_max:
                rho = min(rho * cfg.rho_mult, cfg.rho_max)
                continue
            break
        w = w_new
        alphas = alphas + rho * h_new
        Wcur = w.reshape(K, d, d)
        primal = sem_loss(Wcur, dataset) + group_penalty(Wcur, cfg.penalty)
        if not np.isfinite(primal):
            raise SolverDivergenceError(
                "objective became non-finite during optimization",
                trace=tuple(trace),
            )
        trace.append(TraceRecord(outer, primal, max_h, rho, inner_total))
        if max_h < best["max_h"] or (
            max_h == best["max_h"] and primal < best["objective"]
        ):
            best = {"w": w.copy(), "h_vec": h_new.copy(), "max_h": max_h,
                    "objective": primal, "alphas": alphas.copy()}
        h_prev = max_h
        if max_h <= cfg.h_tol:
            converged = True
            message = "constraint tolerance reached"
            break
        if rho >= cfg.rho_max:
            message = "rho reached rho_max before the constraint tolerance"
            break

    if converged:
        W_final = w.reshape(K, d, d).copy()
        h_final = h_new.copy()
        alphas_final = alphas.copy()
    else:
        W_final = best["w"].reshape(K, d, d).copy()
        h_final = best["h_vec"].copy()
        alphas_final = best["alphas"].copy()
    state = SolverState(
        W=W_final,
        alphas=alphas_final,
        rho=rho,
        outer_iter=outer,
        h_values=h_final,
        trace=tuple(trace),
        converged=converged,
        message=message,
    )
    return W_final, state
