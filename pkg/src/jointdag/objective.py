"""Score function pieces: squared loss, group penalty, augmented Lagrangian."""

from dataclasses import dataclass

import numpy as np

from . import acyclicity
from ._validation import as_weight_stack, check_nonnegative
from .exceptions import InvalidArgumentError

__all__ = [
    "PenaltyParams",
    "sem_loss",
    "sem_loss_gradient",
    "group_penalty",
    "smooth_objective",
]


@dataclass
class PenaltyParams:
    """Sparsity and cross-group coupling strengths.

    ``lambda1`` weights the elementwise L1 penalty on off-diagonal entries
    of every group matrix; ``lambda2`` weights the group-L2 penalty that
    couples the same edge across groups.  Setting both to zero recovers a
    plain acyclicity-constrained least-squares fit per group.
    ``group_smoothing_eps`` is the epsilon used to smooth the group-L2 term
    inside the differentiable objective; it introduces a bias of order
    ``sqrt(eps)`` and is not applied to :func:`group_penalty` itself.
    """

    lambda1: float = 0.0
    lambda2: float = 0.0
    group_smoothing_eps: float = 1e-8

    def __post_init__(self):
        self.lambda1 = check_nonnegative(self.lambda1, "lambda1")
        self.lambda2 = check_nonnegative(self.lambda2, "lambda2")
        if not np.isfinite(self.group_smoothing_eps) or self.group_smoothing_eps <= 0:
            raise InvalidArgumentError(
                f"group_smoothing_eps must be positive, got {self.group_smoothing_eps!r}"
            )
        self.group_smoothing_eps = float(self.group_smoothing_eps)


def _offdiag_mask(d):
    mask = np.ones((d, d), dtype=bool)
    np.fill_diagonal(mask, False)
    return mask


def sem_loss(W, dataset):
    """Average squared reconstruction loss summed over groups.

    Computes ``sum_k ||X_k - X_k W_k||_F^2 / (2 n_k)`` where ``X_k`` is the
    observation matrix of group k and ``W_k`` the corresponding weighted
    adjacency matrix.

    Parameters
    ----------
    W : array-like of shape (n_groups, d, d)
        One weight matrix per group (a single matrix is accepted for K=1).
    dataset : GroupedDataset

    Returns
    -------
    float
    """
    W = as_weight_stack(W, dataset.n_groups, dataset.n_variables)
    total = 0.0
    for Wk, Xk in zip(W, dataset.groups):
        R = Xk - Xk @ Wk
        total += float(np.sum(R * R)) / (2.0 * Xk.shape[0])
    return total


def sem_loss_gradient(W, dataset):
    """Gradient of :func:`sem_loss` with respect to each group matrix.

    Returns an array of shape (n_groups, d, d) whose k-th slice is
    ``-X_k^T (X_k - X_k W_k) / n_k``.
    """
    W = as_weight_stack(W, dataset.n_groups, dataset.n_variables)
    grad = np.zeros_like(W)
    for k, (Wk, Xk) in enumerate(zip(W, dataset.groups)):
        R = Xk - Xk @ Wk
        grad[k] = -(Xk.T @ R) / Xk.shape[0]
    return grad


def group_penalty(W, params):
    """Exact (non-smoothed) sparsity plus group coupling penalty.

    ``lambda1 * sum_k sum_{i != j} |W_k[i, j]|`` plus
    ``lambda2 * sum_{i != j} sqrt(sum_k W_k[i, j]^2)``.  Diagonal entries
    are excluded from both terms.

    Parameters
    ----------
    W : array-like of shape (n_groups, d, d)
    params : PenaltyParams

    Returns
    -------
    float
        Non-negative penalty value.
    """
    W = as_weight_stack(W)
    off = _offdiag_mask(W.shape[1])
    value = 0.0
    if params.lambda1 > 0:
        value += params.lambda1 * float(np.abs(W[:, off]).sum())
    if params.lambda2 > 0:
        value += params.lambda2 * float(np.sqrt((W ** 2).sum(axis=0)[off]).sum())
    return value


def smooth_objective(W, dataset, params, rho, alphas):
    """Differentiable part of the augmented Lagrangian, with its gradient.

    The value is the sum of

    - the squared loss :func:`sem_loss`,
    - the acyclicity terms ``(rho / 2) h(W_k)^2 + alphas[k] h(W_k)`` per group,
    - the epsilon-smoothed group-L2 penalty
      ``lambda2 * sum_{i != j} sqrt(sum_k W_k[i, j]^2 + eps)``.

    The elementwise L1 term is deliberately absent: it is non-smooth and is
    handled by the proximal solver, not by this function.

    Parameters
    ----------
    W : array-like of shape (n_groups, d, d)
    dataset : GroupedDataset
    params : PenaltyParams
    rho : float
        Quadratic penalty weight, non-negative.
    alphas : array-like of shape (n_groups,)
        Lagrange multiplier estimates, one per group.

    Returns
    -------
    value : float
    gradient : ndarray of shape (n_groups, d, d)
    """
    K, d = dataset.n_groups, dataset.n_variables
    W = as_weight_stack(W, K, d)
    rho = float(rho)
    if not np.isfinite(rho) or rho < 0:
        raise InvalidArgumentError(f"rho must be non-negative, got {rho!r}")
    alphas = np.asarray(alphas, dtype=np.float64)
    if alphas.shape != (K,):
        raise InvalidArgumentError(
            f"alphas must have shape ({K},), got {alphas.shape}"
        )

    value = 0.0
    grad = np.zeros_like(W)
    # Groups are accumulated in index order so the sum is reproducible.
    # Overflow anywhere (huge trial steps during a line search) yields the
    # pair (inf, zeros): the caller rejects such a point on the value alone.
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(K):
            Xk = dataset.groups[k]
            Wk = W[k]
            R = Xk - Xk @ Wk
            value += float(np.sum(R * R)) / (2.0 * Xk.shape[0])
            grad[k] = -(Xk.T @ R) / Xk.shape[0]
            hk, hk_grad = acyclicity._value_and_gradient(Wk)
            if not np.isfinite(hk):
                return float("inf"), np.zeros_like(W)
            value += 0.5 * rho * hk * hk + alphas[k] * hk
            grad[k] += (rho * hk + alphas[k]) * hk_grad
        if params.lambda2 > 0:
            off = _offdiag_mask(d)
            root = np.sqrt((W ** 2).sum(axis=0) + params.group_smoothing_eps)
            value += params.lambda2 * float(root[off].sum())
            gterm = params.lambda2 * W / root[None, :, :]
            gterm[:, ~off] = 0.0
            grad += gterm
    if not (np.isfinite(value) and np.isfinite(grad).all()):
        return float("inf"), np.zeros_like(W)
    return value, grad
