"""Estimator front end with the scikit-learn fit/get_params conventions."""

import numpy as np
from sklearn.base import BaseEstimator

from .data import GroupedDataset
from .exceptions import InvalidArgumentError
from .graph import threshold_to_dag
from .model_selection import cross_validate, default_grid
from .objective import PenaltyParams, sem_loss
from .solver import SolverConfig, fit_joint

__all__ = ["JointDagEstimator", "JointDagCV"]


def _as_group_list(X):
    """Accept a single matrix, a sequence of matrices, or a 3-d array."""
    if isinstance(X, GroupedDataset):
        return X
    if isinstance(X, np.ndarray) and X.ndim == 2:
        return [X]
    if isinstance(X, np.ndarray) and X.ndim == 3:
        return list(X)
    if isinstance(X, (list, tuple)):
        return list(X)
    raise InvalidArgumentError(
        "X must be a 2-d array, a sequence of 2-d arrays, a 3-d array, or a "
        "GroupedDataset"
    )


class JointDagEstimator(BaseEstimator):
    """Jointly estimate one DAG per observation group.

    Fits one weighted adjacency matrix per group by minimizing the grouped
    squared loss plus an elementwise L1 penalty (``lambda1``) and a
    cross-group coupling penalty (``lambda2``), subject to each matrix
    having acyclic support.  ``lambda2 = 0`` decouples the groups into
    independent fits; a single group with both weights at zero reduces to a
    plain acyclicity-constrained least-squares fit.

    Parameters
    ----------
    lambda1 : float
        Elementwise L1 weight.
    lambda2 : float
        Group coupling weight.
    threshold : float
        Edges with fitted ``|weight|`` at or below this are dropped when
        building the binary graphs in ``graphs_``.
    center, scale : bool
        Ingestion transforms applied to each group's columns.
    h_tol, rho_init, rho_mult, rho_max, max_outer_iters, inner_max_iters,
    lbfgs_memory, progress_factor, group_smoothing_eps :
        Solver settings; see :class:`jointdag.solver.SolverConfig`.
    random_state : int
        Recorded alongside the fit; the optimization itself is
        deterministic from a zero start.

    Attributes
    ----------
    weights_ : ndarray of shape (n_groups, d, d)
        Fitted weighted adjacency matrices with zero diagonals.
    graphs_ : tuple of BinaryDigraph
        Thresholded binary DAGs, one per group.
    state_ : SolverState
        Convergence diagnostics and the per-iteration trace.
    converged_ : bool
    h_values_ : ndarray of shape (n_groups,)
        Final acyclicity values per group.
    n_features_in_ : int
    feature_names_in_ : tuple of str

    Examples
    --------
    >>> est = JointDagEstimator(lambda1=0.05, lambda2=0.1)
    >>> est.fit([X_group1, X_group2])          # doctest: +SKIP
    >>> est.weights_.shape                     # doctest: +SKIP
    (2, d, d)
    """

    def __init__(self, lambda1=0.1, lambda2=0.1, threshold=0.3, center=True,
                 scale=False, h_tol=1e-8, rho_init=1.0, rho_mult=10.0,
                 rho_max=1e16, max_outer_iters=100, inner_max_iters=500,
                 lbfgs_memory=10, progress_factor=0.25,
                 group_smoothing_eps=1e-8, random_state=0):
        self.lambda1 = lambda1
        self.lambda2 = lambda2
        self.threshold = threshold
        self.center = center
        self.scale = scale
        self.h_tol = h_tol
        self.rho_init = rho_init
        self.rho_mult = rho_mult
        self.rho_max = rho_max
        self.max_outer_iters = max_outer_iters
        self.inner_max_iters = inner_max_iters
        self.lbfgs_memory = lbfgs_memory
        self.progress_factor = progress_factor
        self.group_smoothing_eps = group_smoothing_eps
        self.random_state = random_state

    def _solver_config(self, lambda1=None, lambda2=None):
        return SolverConfig(
            penalty=PenaltyParams(
                lambda1=self.lambda1 if lambda1 is None else lambda1,
                lambda2=self.lambda2 if lambda2 is None else lambda2,
                group_smoothing_eps=self.group_smoothing_eps,
            ),
            rho_init=self.rho_init,
            rho_mult=self.rho_mult,
            rho_max=self.rho_max,
            h_tol=self.h_tol,
            max_outer_iters=self.max_outer_iters,
            inner_max_iters=self.inner_max_iters,
            lbfgs_memory=self.lbfgs_memory,
            progress_factor=self.progress_factor,
            threshold_omega=self.threshold,
        )

    def _ingest(self, X):
        data = _as_group_list(X)
        if isinstance(data, GroupedDataset):
            return data
        return GroupedDataset.from_arrays(
            data, center=self.center, scale=self.scale
        )

    def fit(self, X, y=None):
        """Fit one weight matrix per group.

        Parameters
        ----------
        X : sequence of ndarray, ndarray, or GroupedDataset
            The groups; each matrix is n_k-by-d over the same d variables.
        y : ignored
            Present for interface compatibility.

        Returns
        -------
        self
        """
        dataset = self._ingest(X)
        cfg = self._solver_config()
        W, state = fit_joint(dataset, cfg, seed=self.random_state)
        self.dataset_ = dataset
        self.weights_ = W
        self.state_ = state
        self.converged_ = state.converged
        self.h_values_ = state.h_values
        self.graphs_ = tuple(
            threshold_to_dag(W[k], self.threshold, dataset.variable_names)
            for k in range(dataset.n_groups)
        )
        self.n_features_in_ = dataset.n_variables
        self.feature_names_in_ = dataset.variable_names
        return self

    def score(self, X, y=None):
        """Negative reconstruction loss of the fitted weights on new data.

        Higher is better, matching the scikit-learn convention.  The new
        groups must match the fitted number of groups and variables and
        receive the same ingestion transforms.
        """
        if not hasattr(self, "weights_"):
            raise InvalidArgumentError("estimator is not fitted yet")
        dataset = self._ingest(X)
        return -sem_loss(self.weights_, dataset)


class JointDagCV(BaseEstimator):
    """Joint DAG estimation with the penalty weights chosen by k-fold CV.

    Scores a grid of (lambda1, lambda2) pairs by held-out reconstruction
    loss, then refits on the full data at the winning pair.  After
    ``fit``, exposes the same fitted attributes as
    :class:`JointDagEstimator` plus the selection results.

    Parameters
    ----------
    lambda1_grid, lambda2_grid : sequences of float
        The grid is their Cartesian product.
    folds : int
    n_jobs : int
        Parallel workers over grid-by-fold fits.
    (remaining parameters as in :class:`JointDagEstimator`)

    Attributes
    ----------
    best_lambda1_, best_lambda2_ : float
    cv_table_ : list of CVEntry
    weights_, graphs_, state_, converged_, h_values_ : as in the plain
        estimator, from the final full-data refit.
    """

    def __init__(self, lambda1_grid=(1e-3, 1e-2, 1e-1),
                 lambda2_grid=(0.0, 1e-2, 1e-1, 1.0), folds=5, n_jobs=1,
                 threshold=0.3, center=True, scale=False, h_tol=1e-8,
                 rho_init=1.0, rho_mult=10.0, rho_max=1e16,
                 max_outer_iters=100, inner_max_iters=500, lbfgs_memory=10,
                 progress_factor=0.25, group_smoothing_eps=1e-8,
                 random_state=0):
        self.lambda1_grid = lambda1_grid
        self.lambda2_grid = lambda2_grid
        self.folds = folds
        self.n_jobs = n_jobs
        self.threshold = threshold
        self.center = center
        self.scale = scale
        self.h_tol = h_tol
        self.rho_init = rho_init
        self.rho_mult = rho_mult
        self.rho_max = rho_max
        self.max_outer_iters = max_outer_iters
        self.inner_max_iters = inner_max_iters
        self.lbfgs_memory = lbfgs_memory
        self.progress_factor = progress_factor
        self.group_smoothing_eps = group_smoothing_eps
        self.random_state = random_state

    def fit(self, X, y=None):
        """Select the penalty weights by cross-validation, then refit.

        Returns
        -------
        self
        """
        base = JointDagEstimator(
            threshold=self.threshold, center=self.center, scale=self.scale,
            h_tol=self.h_tol, rho_init=self.rho_init, rho_mult=self.rho_mult,
            rho_max=self.rho_max, max_outer_iters=self.max_outer_iters,
            inner_max_iters=self.inner_max_iters,
            lbfgs_memory=self.lbfgs_memory,
            progress_factor=self.progress_factor,
            group_smoothing_eps=self.group_smoothing_eps,
            random_state=self.random_state,
        )
        dataset = base._ingest(X)
        grid = tuple(
            (float(l1), float(l2))
            for l1 in self.lambda1_grid
            for l2 in self.lambda2_grid
        )
        if not grid:
            grid = default_grid()
        (l1_best, l2_best), table = cross_validate(
            dataset,
            grid=grid,
            folds=self.folds,
            config=base._solver_config(lambda1=0.0, lambda2=0.0),
            seed=self.random_state,
            n_jobs=self.n_jobs,
        )
        self.best_lambda1_ = l1_best
        self.best_lambda2_ = l2_best
        self.cv_table_ = table
        final = base.set_params(lambda1=l1_best, lambda2=l2_best).fit(dataset)
        self.dataset_ = final.dataset_
        self.weights_ = final.weights_
        self.state_ = final.state_
        self.converged_ = final.converged_
        self.h_values_ = final.h_values_
        self.graphs_ = final.graphs_
        self.n_features_in_ = final.n_features_in_
        self.feature_names_in_ = final.feature_names_in_
        return self

    def score(self, X, y=None):
        """Negative reconstruction loss of the refitted weights."""
        if not hasattr(self, "weights_"):
            raise InvalidArgumentError("estimator is not fitted yet")
        dataset = JointDagEstimator(
            center=self.center, scale=self.scale
        )._ingest(X)
        return -sem_loss(self.weights_, dataset)
