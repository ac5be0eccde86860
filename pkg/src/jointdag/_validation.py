"""Input validation helpers used across the public API."""

import numpy as np

from .exceptions import InvalidArgumentError


def as_square_matrix(W, name="W"):
    """Coerce ``W`` to a finite square float64 array or raise."""
    W = np.asarray(W, dtype=np.float64)
    if W.ndim != 2 or W.shape[0] != W.shape[1]:
        raise InvalidArgumentError(
            f"{name} must be a square matrix, got shape {W.shape}"
        )
    if not np.all(np.isfinite(W)):
        raise InvalidArgumentError(f"{name} contains non-finite entries")
    return W


def as_weight_stack(W, n_groups=None, n_variables=None, name="W"):
    """Coerce ``W`` to a (K, d, d) float64 stack of square matrices.

    Accepts a single matrix, a sequence of matrices, or a 3-d array.
    Shapes are checked against ``n_groups``/``n_variables`` when given.
    """
    if isinstance(W, np.ndarray) and W.ndim == 2:
        W = W[None, :, :]
    elif not isinstance(W, np.ndarray):
        W = np.stack([as_square_matrix(Wk, name=f"{name}[{k}]") for k, Wk in enumerate(W)])
    W = np.asarray(W, dtype=np.float64)
    if W.ndim != 3 or W.shape[1] != W.shape[2]:
        raise InvalidArgumentError(
            f"{name} must have shape (n_groups, d, d), got {W.shape}"
        )
    if not np.all(np.isfinite(W)):
        raise InvalidArgumentError(f"{name} contains non-finite entries")
    if n_groups is not None and W.shape[0] != n_groups:
        raise InvalidArgumentError(
            f"{name} has {W.shape[0]} matrices but the dataset has {n_groups} groups"
        )
    if n_variables is not None and W.shape[1] != n_variables:
        raise InvalidArgumentError(
            f"{name} is {W.shape[1]}x{W.shape[2]} but the dataset has "
            f"{n_variables} variables"
        )
    return W


def check_zero_diagonal(W, name="W"):
    """Raise unless every matrix in the stack has an exactly zero diagonal."""
    W = np.asarray(W)
    diags = np.diagonal(W, axis1=-2, axis2=-1)
    if np.any(diags != 0.0):
        raise InvalidArgumentError(f"{name} must have zero diagonal entries")
    return W


def check_positive(value, name):
    if not np.isfinite(value) or value <= 0:
        raise InvalidArgumentError(f"{name} must be positive, got {value!r}")
    return float(value)


def check_nonnegative(value, name):
    if not np.isfinite(value) or value < 0:
        raise InvalidArgumentError(f"{name} must be non-negative, got {value!r}")
    return float(value)
