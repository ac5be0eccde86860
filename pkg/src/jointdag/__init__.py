"""Joint structure learning of directed acyclic graphs across groups.

Estimates one weighted DAG per observation group under a linear structural
model, with an elementwise sparsity penalty and a cross-group coupling
penalty that shares statistical strength between groups.  Ships with a
synthetic benchmark, structure-recovery metrics, directed-network
measures, permutation-based group comparison, cross-validated penalty
selection, and a command-line interface.
"""

from .acyclicity import acyclicity_gradient, acyclicity_value, matrix_exponential
from .compare import (
    CompareReport,
    EdgeStat,
    extract_ctes,
    fdr_correct,
    permutation_test,
)
from .data import GroupedDataset, load_dataset
from .estimator import JointDagCV, JointDagEstimator
from .exceptions import (
    DataIngestionError,
    InvalidArgumentError,
    JointDagError,
    SolverDivergenceError,
)
from .graph import (
    BinaryDigraph,
    CycleRepairWarning,
    is_acyclic,
    read_edge_tsv,
    threshold_edges,
    threshold_to_dag,
    write_edge_tsv,
)
from .measures import (
    HubReport,
    MeasureReport,
    assortativity,
    clustering_and_transitivity,
    compute_measures,
    degrees,
    density,
    find_hubs,
    global_efficiency,
    local_efficiency,
    rich_club_max,
)
from .metrics import EvalReport, evaluate
from .model_selection import CVEntry, cross_validate, default_grid
from .objective import (
    PenaltyParams,
    group_penalty,
    sem_loss,
    sem_loss_gradient,
    smooth_objective,
)
from .simulate import (
    SimResult,
    SimSpec,
    assign_weights,
    derive_group_graphs,
    generate_backbone,
    sample_sem,
    simulate,
)
from .solver import (
    LbfgsHessian,
    SolverConfig,
    SolverState,
    TraceRecord,
    fit_joint,
    lbfgs_two_loop,
    minimize_smooth,
    pqn_direction,
    select_active_set,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "acyclicity_value",
    "acyclicity_gradient",
    "matrix_exponential",
    "GroupedDataset",
    "load_dataset",
    "PenaltyParams",
    "sem_loss",
    "sem_loss_gradient",
    "group_penalty",
    "smooth_objective",
    "SolverConfig",
    "SolverState",
    "TraceRecord",
    "fit_joint",
    "minimize_smooth",
    "lbfgs_two_loop",
    "LbfgsHessian",
    "select_active_set",
    "pqn_direction",
    "JointDagEstimator",
    "JointDagCV",
    "BinaryDigraph",
    "CycleRepairWarning",
    "is_acyclic",
    "threshold_edges",
    "threshold_to_dag",
    "write_edge_tsv",
    "read_edge_tsv",
    "SimSpec",
    "SimResult",
    "generate_backbone",
    "derive_group_graphs",
    "assign_weights",
    "sample_sem",
    "simulate",
    "EvalReport",
    "evaluate",
    "MeasureReport",
    "HubReport",
    "degrees",
    "density",
    "global_efficiency",
    "local_efficiency",
    "clustering_and_transitivity",
    "assortativity",
    "rich_club_max",
    "find_hubs",
    "compute_measures",
    "EdgeStat",
    "CompareReport",
    "permutation_test",
    "fdr_correct",
    "extract_ctes",
    "CVEntry",
    "cross_validate",
    "default_grid",
    "JointDagError",
    "InvalidArgumentError",
    "DataIngestionError",
    "SolverDivergenceError",
]
