"""Differentiable acyclicity measure for weighted directed graphs.

The central quantity is ``h(W) = trace(expm(W * W)) - d`` where ``*`` is the
elementwise product and ``d`` the number of nodes.  ``h`` is zero exactly
when the support of ``W`` (its nonzero pattern) is a directed acyclic graph
and strictly positive otherwise, which turns the combinatorial acyclicity
constraint into a smooth equality constraint usable inside a continuous
optimizer.
"""

import numpy as np
import scipy.linalg

from ._validation import as_square_matrix

__all__ = ["matrix_exponential", "acyclicity_value", "acyclicity_gradient"]


def matrix_exponential(A):
    """Dense matrix exponential ``expm(A)``.

    Parameters
    ----------
    A : ndarray of shape (d, d)
        Square matrix with finite entries.

    Returns
    -------
    ndarray of shape (d, d)
        ``expm(A)`` computed by scaling-and-squaring with a degree-13 Pade
        approximant.

    Notes
    -----
    Delegates to :func:`scipy.linalg.expm`, which implements the
    scaling-and-squaring algorithm with the degree-13 Pade approximant.
    """
    A = as_square_matrix(A, name="A")
    return scipy.linalg.expm(A)


def _expm_hadamard_square(W):
    # Overflow in the exponential shows up as inf entries; the solvers treat
    # a non-finite objective as a rejected trial step, so do not warn here.
    with np.errstate(over="ignore", invalid="ignore"):
        return scipy.linalg.expm(W * W)


def acyclicity_value(W):
    """Smooth acyclicity measure of a weighted adjacency matrix.

    Parameters
    ----------
    W : ndarray of shape (d, d)
        Square matrix with finite entries.  The diagonal may be nonzero;
        a nonzero diagonal entry is a self-loop and counts as a cycle.

    Returns
    -------
    float
        ``trace(expm(W * W)) - d``, which is 0 exactly when the support of
        ``W`` is acyclic and positive otherwise.
    """
    W = as_square_matrix(W)
    d = W.shape[0]
    value = float(np.trace(_expm_hadamard_square(W))) - d
    # expm of an entrywise non-negative matrix has trace >= d; clamp the
    # tiny negative values that finite precision can produce.
    if -1e-9 < value < 0.0:
        value = 0.0
    return value


def acyclicity_gradient(W):
    """Gradient of :func:`acyclicity_value` with respect to ``W``.

    Parameters
    ----------
    W : ndarray of shape (d, d)
        Square matrix with finite entries.

    Returns
    -------
    ndarray of shape (d, d)
        ``2 * expm(W * W).T * W`` (elementwise product).
    """
    W = as_square_matrix(W)
    with np.errstate(over="ignore", invalid="ignore"):
        return 2.0 * _expm_hadamard_square(W).T * W


def _value_and_gradient(W):
    """Value and gradient sharing a single matrix exponential.

    When the exponential overflows, the pair ``(inf, zeros)`` comes back:
    the optimizer rejects such a trial point on the value alone and never
    reads the gradient there.
    """
    E = _expm_hadamard_square(W)
    value = float(np.trace(E)) - W.shape[0]
    with np.errstate(over="ignore", invalid="ignore"):
        grad = 2.0 * E.T * W
    if not (np.isfinite(value) and np.isfinite(grad).all()):
        return float("inf"), np.zeros_like(W)
    if -1e-9 < value < 0.0:
        value = 0.0
    return value, grad
