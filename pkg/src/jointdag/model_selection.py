"""Cross-validated choice of the penalty weights."""

from dataclasses import dataclass, replace

import numpy as np
from joblib import Parallel, delayed

from .exceptions import InvalidArgumentError
from .objective import sem_loss
from .solver import SolverConfig, fit_joint

__all__ = ["CVEntry", "cross_validate", "default_grid"]


def default_grid():
    """Default (lambda1, lambda2) grid, anchored at the commonly useful
    decade around 1e-2 for both weights."""
    lambda1s = (1e-3, 1e-2, 1e-1)
    lambda2s = (0.0, 1e-2, 1e-1, 1.0)
    return tuple((l1, l2) for l1 in lambda1s for l2 in lambda2s)


@dataclass(frozen=True)
class CVEntry:
    """Held-out losses for one grid point."""

    lambda1: float
    lambda2: float
    fold_losses: tuple
    mean_loss: float
    sd_loss: float


def _fold_assignments(dataset, folds, seed):
    """Per-group shuffled row partition into ``folds`` near-equal blocks.

    Within each group the block sizes differ by at most one row, so every
    fold preserves the group proportions as closely as possible.
    """
    rng = np.random.Generator(np.random.Philox(key=int(seed)))
    blocks = []
    for X in dataset.groups:
        perm = rng.permutation(X.shape[0])
        blocks.append([np.sort(b) for b in np.array_split(perm, folds)])
    return blocks


def cross_validate(dataset, grid=None, folds=5, config=None, seed=0, n_jobs=1):
    """Score a (lambda1, lambda2) grid by k-fold held-out loss.

    Rows of each group are shuffled once (seeded) and split into ``folds``
    near-equal blocks; for every grid point and fold, the model is fit on
    the remaining blocks and scored by :func:`jointdag.objective.sem_loss`
    on the held-out block.  The winning pair minimizes the mean held-out
    loss; exact ties resolve toward the larger ``lambda1``, then the larger
    ``lambda2`` (preferring the sparser model).

    Parameters
    ----------
    dataset : GroupedDataset
    grid : sequence of (float, float), optional
        Defaults to :func:`default_grid`.
    folds : int
    config : SolverConfig, optional
        Base configuration; its penalty weights are overridden per grid
        point, everything else is shared.
    seed : int
        Seeds the fold shuffle (and is forwarded to the fits).
    n_jobs : int
        Parallel workers over the grid-by-fold task list.

    Returns
    -------
    ((float, float), list of CVEntry)
        The winning pair and the full score table in grid order.
    """
    if grid is None:
        grid = default_grid()
    grid = [(float(l1), float(l2)) for l1, l2 in grid]
    if not grid:
        raise InvalidArgumentError("grid must contain at least one point")
    if folds < 2:
        raise InvalidArgumentError(f"folds must be at least 2, got {folds}")
    for n_k in dataset.n_rows:
        if n_k < folds:
            raise InvalidArgumentError(
                f"every group needs at least {folds} rows for {folds}-fold "
                f"cross-validation, got a group with {n_k}"
            )
    cfg = config if config is not None else SolverConfig()
    blocks = _fold_assignments(dataset, folds, seed)

    def _split(fold):
        test_idx = [b[fold] for b in blocks]
        train_idx = [
            np.sort(np.concatenate([b[f] for f in range(folds) if f != fold]))
            for b in blocks
        ]
        return dataset.subset_rows(train_idx), dataset.subset_rows(test_idx)

    splits = [_split(f) for f in range(folds)]

    def _one_task(l1, l2, fold):
        cfg_pt = replace(
            cfg, penalty=replace(cfg.penalty, lambda1=l1, lambda2=l2)
        )
        train, test = splits[fold]
        W, _ = fit_joint(train, cfg_pt, seed=seed)
        return sem_loss(W, test)

    tasks = [(l1, l2, f) for (l1, l2) in grid for f in range(folds)]
    if n_jobs == 1:
        losses = [_one_task(*t) for t in tasks]
    else:
        losses = Parallel(n_jobs=n_jobs)(delayed(_one_task)(*t) for t in tasks)

    table = []
    for g, (l1, l2) in enumerate(grid):
        fold_losses = tuple(losses[g * folds + f] for f in range(folds))
        table.append(
            CVEntry(
                lambda1=l1,
                lambda2=l2,
                fold_losses=fold_losses,
                mean_loss=float(np.mean(fold_losses)),
                sd_loss=float(np.std(fold_losses)),
            )
        )
    best = min(table, key=lambda e: (e.mean_loss, -e.lambda1, -e.lambda2))
    return (best.lambda1, best.lambda2), table
