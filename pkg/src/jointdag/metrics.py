"""Structure-recovery metrics for estimated versus true directed graphs."""

from dataclasses import dataclass

from .exceptions import InvalidArgumentError

__all__ = ["EvalReport", "evaluate"]


@dataclass(frozen=True)
class EvalReport:
    """Edge-level counts and the derived rates.

    Counts follow the usual conventions for directed structure recovery:
    a true positive requires the correct direction; an estimated edge whose
    reverse (and only its reverse) is in the truth counts as reversed; an
    estimated edge absent from the truth's undirected skeleton is a false
    positive.  ``extra`` and ``missing`` compare undirected skeletons.
    """

    tp: int
    fp: int
    fn_count: int
    reversed: int
    extra: int
    missing: int
    n_predicted: int
    n_true: int
    fdr: float
    tpr: float
    shd: int

    def to_dict(self):
        return {
            "tp": self.tp,
            "fp": self.fp,
            "fn_count": self.fn_count,
            "reversed": self.reversed,
            "extra": self.extra,
            "missing": self.missing,
            "n_predicted": self.n_predicted,
            "n_true": self.n_true,
            "fdr": self.fdr,
            "tpr": self.tpr,
            "shd": self.shd,
        }


def evaluate(estimated, truth):
    """Compare an estimated directed graph against the ground truth.

    Parameters
    ----------
    estimated, truth : BinaryDigraph
        Graphs over the same node set (equal ``d``; labels, when present on
        both, must match in order -- nodes are never silently reordered).

    Returns
    -------
    EvalReport
        With ``fdr = (reversed + fp) / max(n_predicted, 1)`` (0 for an
        empty prediction), ``tpr = tp / max(n_true, 1)`` (1 for an empty
        truth), and ``shd = extra + missing + reversed``.
    """
    if estimated.d != truth.d:
        raise InvalidArgumentError(
            f"graphs differ in size: {estimated.d} vs {truth.d} nodes"
        )
    if estimated.node_labels != truth.node_labels:
        raise InvalidArgumentError(
            "graphs carry different node labels; align them explicitly "
            "before evaluating"
        )
    est = estimated.edges
    tru = truth.edges
    tp = len(est & tru)
    rev = sum(1 for (i, j) in est if (j, i) in tru and (i, j) not in tru)
    fp = sum(1 for (i, j) in est if (i, j) not in tru and (j, i) not in tru)
    est_skel = {(min(i, j), max(i, j)) for i, j in est}
    tru_skel = {(min(i, j), max(i, j)) for i, j in tru}
    extra = len(est_skel - tru_skel)
    missing = len(tru_skel - est_skel)
    n_pred = len(est)
    n_true = len(tru)
    fdr = (rev + fp) / n_pred if n_pred > 0 else 0.0
    tpr = tp / n_true if n_true > 0 else 1.0
    shd = extra + missing + rev
    return EvalReport(
        tp=tp,
        fp=fp,
        fn_count=n_true - tp,
        reversed=rev,
        extra=extra,
        missing=missing,
        n_predicted=n_pred,
        n_true=n_true,
        fdr=fdr,
        tpr=tpr,
        shd=shd,
    )
