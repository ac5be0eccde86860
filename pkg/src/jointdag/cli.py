"""Command-line interface.

Subcommands: simulate, fit, evaluate, measures, compare, cv, rerun.  Every
run writes a manifest (command, resolved arguments, input digests, seed,
version, timestamp) next to its outputs; ``rerun <manifest>`` re-executes
the recorded run and reproduces the same output bytes in a fresh
directory.  Exit codes: 0 success, 1 usage error, 2 data error, 3 solver
divergence.
"""

import argparse
import csv
import datetime
import hashlib
import io
import json
import os
import sys
import warnings

import numpy as np

from . import __version__
from .compare import permutation_test
from .data import load_dataset
from .exceptions import (
    DataIngestionError,
    InvalidArgumentError,
    JointDagError,
    SolverDivergenceError,
)
from .graph import (
    BinaryDigraph,
    CycleRepairWarning,
    read_edge_tsv,
    threshold_to_dag,
    write_edge_tsv,
)
from .measures import compute_measures
from .metrics import evaluate
from .model_selection import cross_validate, default_grid
from .objective import PenaltyParams
from .simulate import SimSpec, simulate
from .solver import SolverConfig, fit_joint

OUT_DIR_ENV = "JOINTDAG_OUT_DIR"


class UsageError(JointDagError):
    """Bad command line or bad option values."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _fmt(x):
    """17-significant-digit text form; round-trips float64 exactly."""
    return format(float(x), ".17g")


def _atomic_write_text(path, text):
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w", newline="", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _json_text(obj):
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _now_utc():
    return datetime.datetime.now(datetime.timezone.utc).strftime(
        "%Y-%m-%dT%H:%M:%S.%fZ"
    )


def _write_manifest(out_dir, command, args, inputs, outputs):
    recorded = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    recorded["seed"] = getattr(args, "seed", None)
    manifest = {
        "command": command,
        "version": __version__,
        "created_utc": _now_utc(),
        "args": recorded,
        "inputs": [
            {"path": os.path.abspath(p), "sha256": _sha256(p)} for p in inputs
        ],
        "outputs": sorted(outputs),
    }
    name = f"{command}_manifest.json"
    _atomic_write_text(os.path.join(out_dir, name), _json_text(manifest))
    return name


def _require(args, *names):
    """Options that must arrive either as flags or through --config."""
    for name in names:
        if getattr(args, name, None) is None:
            raise UsageError(f"--{name.replace('_', '-')} is required")


def _resolve_out_dir(args):
    out_dir = args.out_dir
    if out_dir is None:
        out_dir = os.environ.get(OUT_DIR_ENV, ".")
    os.makedirs(out_dir, exist_ok=True)
    args.out_dir = out_dir
    return out_dir


def _resolve_data_paths(paths):
    """Expand manifest references: a .json argument contributes the data
    files recorded by the run that wrote it."""
    resolved = []
    for p in paths:
        if p.endswith(".json"):
            try:
                with open(p, "r", encoding="utf-8") as fh:
                    manifest = json.load(fh)
            except (OSError, json.JSONDecodeError) as exc:
                raise DataIngestionError(
                    f"cannot read manifest: {exc}", path=p
                ) from exc
            base = os.path.dirname(os.path.abspath(p))
            data_files = [
                name for name in manifest.get("outputs", [])
                if name.startswith("data_") and name.endswith(".csv")
            ]
            if not data_files:
                raise DataIngestionError(
                    "manifest records no data_*.csv outputs", path=p
                )
            resolved.extend(os.path.join(base, name) for name in data_files)
        else:
            resolved.append(p)
    return resolved


def _load_groups(args):
    paths = _resolve_data_paths(args.data)
    group_names = None
    if getattr(args, "group_names", None):
        group_names = [g.strip() for g in args.group_names.split(",")]
    return load_dataset(
        paths,
        group_names=group_names,
        center=not args.no_center,
        scale=args.standardize,
    ), paths


def _solver_config_from(args):
    return SolverConfig(
        penalty=PenaltyParams(lambda1=args.lambda1, lambda2=args.lambda2),
        rho_init=args.rho_init,
        rho_mult=args.rho_mult,
        rho_max=args.rho_max,
        h_tol=args.h_tol,
        max_outer_iters=args.max_outer_iters,
        inner_max_iters=args.inner_max_iters,
        lbfgs_memory=args.lbfgs_memory,
        progress_factor=args.progress_factor,
        threshold_omega=args.threshold,
    )


def _write_matrix_tsv(path, matrix, labels):
    buf = io.StringIO()
    writer = csv.writer(buf, delimiter="\t", lineterminator="\n")
    writer.writerow(labels)
    for row in matrix:
        writer.writerow([_fmt(v) for v in row])
    _atomic_write_text(path, buf.getvalue())


def _write_data_csv(path, matrix, labels):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(labels)
    for row in matrix:
        writer.writerow([_fmt(v) for v in row])
    _atomic_write_text(path, buf.getvalue())


def _write_nodes(path, labels):
    _atomic_write_text(path, "".join(f"{lab}\n" for lab in labels))


def _read_nodes(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            labels = [line.strip() for line in fh if line.strip()]
    except OSError as exc:
        raise DataIngestionError(f"cannot read node list: {exc}", path=path) from exc
    if not labels:
        raise DataIngestionError("node list is empty", path=path)
    return labels


def _write_trace(path, trace):
    lines = [
        json.dumps(
            {
                "outer_iter": t.outer_iter,
                "objective": t.objective,
                "max_h": t.max_h,
                "rho": t.rho,
                "inner_iterations": t.inner_iterations,
            },
            sort_keys=True,
        )
        for t in trace
    ]
    _atomic_write_text(path, "".join(line + "\n" for line in lines))


def _relabel(graph, labels):
    index = {lab: i for i, lab in enumerate(labels)}
    for lab in graph.node_labels:
        if lab not in index and any(
            lab in (graph.node_labels[i], graph.node_labels[j])
            for i, j in graph.edges
        ):
            raise DataIngestionError(f"label {lab!r} is not in the node list")
    edges = set()
    for i, j in graph.edges:
        src, dst = graph.node_labels[i], graph.node_labels[j]
        if src not in index or dst not in index:
            raise DataIngestionError(
                f"edge {src!r} -> {dst!r} uses a label missing from the node list"
            )
        edges.add((index[src], index[dst]))
    return BinaryDigraph(len(labels), frozenset(edges), tuple(labels))


def _cmd_simulate(args):
    _require(args, "d", "n")
    out_dir = _resolve_out_dir(args)
    spec = SimSpec(
        d=args.d,
        n=args.n,
        graph_model=args.model,
        mean_degree=args.mean_degree,
        n_groups=args.groups,
        extra_edges=args.extra_edges,
        weight_range=(args.weight_low, args.weight_high),
        weight_sign=args.weight_sign,
        noise=args.noise,
        noise_scale=args.noise_scale,
        seed=args.seed,
    )
    result = simulate(spec)
    labels = result.backbone.node_labels
    outputs = []
    for k, (graph, W, X) in enumerate(
        zip(result.graphs, result.weights, result.datasets), start=1
    ):
        data_name = f"data_group{k}.csv"
        _write_data_csv(os.path.join(out_dir, data_name), X, labels)
        truth_name = f"truth_group{k}.tsv"
        write_edge_tsv(os.path.join(out_dir, truth_name), graph, W)
        outputs.extend([data_name, truth_name])
    write_edge_tsv(os.path.join(out_dir, "backbone.tsv"), result.backbone)
    _write_nodes(os.path.join(out_dir, "nodes.txt"), labels)
    outputs.extend(["backbone.tsv", "nodes.txt"])
    _write_manifest(out_dir, "simulate", args, [], outputs)
    print(
        f"simulated {spec.n_groups} group(s): d={spec.d}, n={spec.n}, "
        f"backbone edges={result.backbone.n_edges} -> {out_dir}"
    )
    return 0


def _cmd_fit(args):
    _require(args, "data")
    out_dir = _resolve_out_dir(args)
    dataset, paths = _load_groups(args)
    cfg = _solver_config_from(args)
    W, state = fit_joint(dataset, cfg, seed=args.seed)
    labels = dataset.variable_names
    outputs = []
    repairs = {}
    for k, gname in enumerate(dataset.group_names):
        weights_name = f"weights_{gname}.tsv"
        _write_matrix_tsv(os.path.join(out_dir, weights_name), W[k], labels)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", CycleRepairWarning)
            graph = threshold_to_dag(W[k], args.threshold, labels)
        removed = []
        for warning in caught:
            if isinstance(warning.message, CycleRepairWarning):
                removed.extend(list(e) for e in warning.message.removed)
        repairs[gname] = removed
        edges_name = f"edges_{gname}.tsv"
        write_edge_tsv(os.path.join(out_dir, edges_name), graph, W[k])
        outputs.extend([weights_name, edges_name])
    _write_nodes(os.path.join(out_dir, "nodes.txt"), labels)
    outputs.append("nodes.txt")
    report = {
        "converged": state.converged,
        "message": state.message,
        "outer_iterations": state.outer_iter,
        "rho": state.rho,
        "h_values": {
            g: state.h_values[k] for k, g in enumerate(dataset.group_names)
        },
        "edge_counts": {
            g: int(np.sum(np.abs(W[k]) > args.threshold))
            for k, g in enumerate(dataset.group_names)
        },
        "cycle_repair_removals": repairs,
    }
    _atomic_write_text(os.path.join(out_dir, "fit_report.json"), _json_text(report))
    outputs.append("fit_report.json")
    if args.trace:
        _write_trace(os.path.join(out_dir, "trace.jsonl"), state.trace)
        outputs.append("trace.jsonl")
    _write_manifest(out_dir, "fit", args, paths, outputs)
    status = "converged" if state.converged else f"did not converge ({state.message})"
    print(f"fit {dataset.n_groups} group(s), {status} -> {out_dir}")
    return 0


def _load_graph_pair(est_path, truth_path, node_labels):
    est, _ = read_edge_tsv(est_path)
    tru, _ = read_edge_tsv(truth_path)
    labels = node_labels
    if labels is None:
        labels = sorted(set(est.node_labels) | set(tru.node_labels))
    return _relabel(est, labels), _relabel(tru, labels)


def _cmd_evaluate(args):
    _require(args, "estimated", "truth")
    out_dir = _resolve_out_dir(args)
    if len(args.estimated) != len(args.truth):
        raise UsageError(
            f"--estimated and --truth must pair up, got {len(args.estimated)} "
            f"vs {len(args.truth)}"
        )
    node_labels = _read_nodes(args.nodes) if args.nodes else None
    reports = []
    for est_path, truth_path in zip(args.estimated, args.truth):
        est, tru = _load_graph_pair(est_path, truth_path, node_labels)
        reports.append(evaluate(est, tru))
    outputs = []
    if len(reports) == 1:
        payload = reports[0].to_dict()
    else:
        payload = {
            "pairs": [r.to_dict() for r in reports],
            "mean": {
                key: float(np.mean([r.to_dict()[key] for r in reports]))
                for key in ("fdr", "tpr", "shd", "tp", "fp", "extra", "missing")
            },
            "sd": {
                key: float(np.std([r.to_dict()[key] for r in reports]))
                for key in ("fdr", "tpr", "shd", "tp", "fp", "extra", "missing")
            },
        }
        batch_name = "evaluate_batch.tsv"
        buf = io.StringIO()
        writer = csv.writer(buf, delimiter="\t", lineterminator="\n")
        fields = ["estimated", "truth", "tp", "fp", "fn_count", "reversed",
                  "extra", "missing", "n_predicted", "n_true", "fdr", "tpr",
                  "shd"]
        writer.writerow(fields)
        for (est_path, truth_path), rep in zip(
            zip(args.estimated, args.truth), reports
        ):
            d = rep.to_dict()
            writer.writerow(
                [est_path, truth_path]
                + [
                    _fmt(d[f]) if f in ("fdr", "tpr") else d[f]
                    for f in fields[2:]
                ]
            )
        for stat_name, agg in (("mean", np.mean), ("sd", np.std)):
            writer.writerow(
                [stat_name, ""]
                + [
                    _fmt(agg([r.to_dict()[f] for r in reports]))
                    for f in fields[2:]
                ]
            )
        _atomic_write_text(os.path.join(out_dir, batch_name), buf.getvalue())
        outputs.append(batch_name)
    _atomic_write_text(
        os.path.join(out_dir, "evaluate_report.json"), _json_text(payload)
    )
    outputs.append("evaluate_report.json")
    inputs = list(args.estimated) + list(args.truth)
    if args.nodes:
        inputs.append(args.nodes)
    _write_manifest(out_dir, "evaluate", args, inputs, outputs)
    print(_json_text(payload), end="")
    return 0


def _cmd_measures(args):
    _require(args, "graph")
    out_dir = _resolve_out_dir(args)
    graph, _ = read_edge_tsv(args.graph)
    if args.nodes:
        graph = _relabel(graph, _read_nodes(args.nodes))
    report = compute_measures(graph, hub_ddof=args.hub_ddof)
    payload = report.to_dict()
    payload["node_labels"] = list(graph.node_labels)
    _atomic_write_text(
        os.path.join(out_dir, "measures_report.json"), _json_text(payload)
    )
    inputs = [args.graph] + ([args.nodes] if args.nodes else [])
    _write_manifest(out_dir, "measures", args, inputs, ["measures_report.json"])
    print(_json_text(payload), end="")
    return 0


def _cmd_compare(args):
    _require(args, "data")
    out_dir = _resolve_out_dir(args)
    dataset, paths = _load_groups(args)
    cfg = _solver_config_from(args)
    report = permutation_test(
        dataset,
        cfg,
        n_permutations=args.permutations,
        seed=args.seed,
        statistic=args.statistic,
        mode=args.mode,
        q=args.q,
        raw_threshold=args.raw_p,
        n_jobs=args.jobs,
    )
    payload = report.to_dict()
    _atomic_write_text(
        os.path.join(out_dir, "compare_report.json"), _json_text(payload)
    )
    outputs = ["compare_report.json"]
    labels = report.node_labels
    buf = io.StringIO()
    writer = csv.writer(buf, delimiter="\t", lineterminator="\n")
    writer.writerow(["source_label", "target_label", "observed", "p_value",
                     "significant"])
    significant = set(report.significant)
    for e in report.per_edge:
        writer.writerow([
            labels[e.source], labels[e.target], _fmt(e.observed),
            _fmt(e.p_value), int((e.source, e.target) in significant),
        ])
    _atomic_write_text(os.path.join(out_dir, "edge_stats.tsv"), buf.getvalue())
    outputs.append("edge_stats.tsv")
    stats = {(e.source, e.target): e for e in report.per_edge}
    for name, edges in (
        ("cte_group1.tsv", report.cte_group1),
        ("cte_group2.tsv", report.cte_group2),
    ):
        buf = io.StringIO()
        writer = csv.writer(buf, delimiter="\t", lineterminator="\n")
        writer.writerow(["source_label", "target_label", "observed", "p_value"])
        for i, j in edges:
            e = stats[(i, j)]
            writer.writerow(
                [labels[i], labels[j], _fmt(e.observed), _fmt(e.p_value)]
            )
        _atomic_write_text(os.path.join(out_dir, name), buf.getvalue())
        outputs.append(name)
    _write_manifest(out_dir, "compare", args, paths, outputs)
    print(
        f"{len(report.significant)} significant edge(s); "
        f"{len(report.cte_group1)} typical of group 1, "
        f"{len(report.cte_group2)} of group 2 -> {out_dir}"
    )
    return 0


def _parse_grid(text, flag):
    values = []
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        try:
            values.append(float(token))
        except ValueError:
            raise UsageError(f"{flag} expects comma-separated numbers, got {token!r}")
    if not values:
        raise UsageError(f"{flag} must list at least one value")
    return values


def _cmd_cv(args):
    _require(args, "data")
    out_dir = _resolve_out_dir(args)
    dataset, paths = _load_groups(args)
    cfg = _solver_config_from(args)
    if args.lambda1_grid or args.lambda2_grid:
        l1s = _parse_grid(args.lambda1_grid or str(args.lambda1), "--lambda1-grid")
        l2s = _parse_grid(args.lambda2_grid or str(args.lambda2), "--lambda2-grid")
        grid = [(l1, l2) for l1 in l1s for l2 in l2s]
    else:
        grid = list(default_grid())
    best, table = cross_validate(
        dataset, grid=grid, folds=args.folds, config=cfg, seed=args.seed,
        n_jobs=args.jobs,
    )
    payload = {
        "best_lambda1": best[0],
        "best_lambda2": best[1],
        "folds": args.folds,
        "table": [
            {
                "lambda1": e.lambda1,
                "lambda2": e.lambda2,
                "fold_losses": list(e.fold_losses),
                "mean_loss": e.mean_loss,
                "sd_loss": e.sd_loss,
            }
            for e in table
        ],
    }
    _atomic_write_text(os.path.join(out_dir, "cv_report.json"), _json_text(payload))
    _write_manifest(out_dir, "cv", args, paths, ["cv_report.json"])
    print(
        f"best lambda1={_fmt(best[0])}, lambda2={_fmt(best[1])} "
        f"over {len(table)} grid point(s) -> {out_dir}"
    )
    return 0


def _cmd_rerun(args):
    try:
        with open(args.manifest, "r", encoding="utf-8") as fh:
            manifest = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise DataIngestionError(
            f"cannot read manifest: {exc}", path=args.manifest
        ) from exc
    command = manifest.get("command")
    if command not in HANDLERS or command == "rerun":
        raise DataIngestionError(
            f"manifest names unknown command {command!r}", path=args.manifest
        )
    for entry in manifest.get("inputs", []):
        path, digest = entry["path"], entry["sha256"]
        if not os.path.exists(path):
            raise DataIngestionError("recorded input is missing", path=path)
        if _sha256(path) != digest:
            raise DataIngestionError(
                "recorded input changed since the original run (sha256 mismatch)",
                path=path,
            )
    replay = argparse.Namespace(**manifest["args"])
    replay.config = None
    if args.out_dir is not None:
        replay.out_dir = args.out_dir
    return HANDLERS[command](replay)


HANDLERS = {
    "simulate": _cmd_simulate,
    "fit": _cmd_fit,
    "evaluate": _cmd_evaluate,
    "measures": _cmd_measures,
    "compare": _cmd_compare,
    "cv": _cmd_cv,
    "rerun": _cmd_rerun,
}


def _add_common(sub, seed=True, jobs=False):
    sub.add_argument("--out-dir", default=None,
                     help=f"output directory (default: ${OUT_DIR_ENV} or '.')")
    sub.add_argument("--config", default=None,
                     help="flat JSON file of option defaults; flags override")
    if seed:
        sub.add_argument("--seed", type=int, default=0)
    if jobs:
        sub.add_argument("--jobs", type=int, default=1,
                         help="parallel workers (default 1)")


def _add_data_options(sub):
    sub.add_argument("--data", nargs="+", default=None,
                     help="one CSV per group, or a simulate manifest (.json)")
    sub.add_argument("--group-names", default=None,
                     help="comma-separated group names (default: file stems)")
    sub.add_argument("--no-center", action="store_true",
                     help="skip per-column mean centering at ingestion")
    sub.add_argument("--standardize", action="store_true",
                     help="also divide each column by its standard deviation")


def _add_solver_options(sub):
    sub.add_argument("--lambda1", type=float, default=0.1,
                     help="elementwise L1 weight (default 0.1)")
    sub.add_argument("--lambda2", type=float, default=0.1,
                     help="group coupling weight (default 0.1)")
    sub.add_argument("--threshold", type=float, default=0.3,
                     help="edge threshold on |weight| (default 0.3)")
    sub.add_argument("--h-tol", type=float, default=1e-8)
    sub.add_argument("--rho-init", type=float, default=1.0)
    sub.add_argument("--rho-mult", type=float, default=10.0)
    sub.add_argument("--rho-max", type=float, default=1e16)
    sub.add_argument("--max-outer-iters", type=int, default=100)
    sub.add_argument("--inner-max-iters", type=int, default=500)
    sub.add_argument("--lbfgs-memory", type=int, default=10)
    sub.add_argument("--progress-factor", type=float, default=0.25)


def build_parser():
    parser = _Parser(
        prog="jointdag",
        description="Joint structure learning of DAGs across observation groups.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", metavar="COMMAND")
    registry = {}

    sim = subs.add_parser("simulate", parents=[], help="generate a synthetic scenario")
    sim.add_argument("--d", type=int, default=None, help="number of variables")
    sim.add_argument("--n", type=int, default=None, help="rows per group")
    sim.add_argument("--model", choices=("ER", "SF"), default="ER")
    sim.add_argument("--mean-degree", type=float, default=4.0)
    sim.add_argument("--groups", type=int, default=2)
    sim.add_argument("--extra-edges", type=int, default=None)
    sim.add_argument("--weight-low", type=float, default=0.5)
    sim.add_argument("--weight-high", type=float, default=2.0)
    sim.add_argument("--weight-sign", choices=("random_sign", "positive"),
                     default="random_sign")
    sim.add_argument("--noise", choices=("gaussian", "exponential", "gumbel"),
                     default="gaussian")
    sim.add_argument("--noise-scale", type=float, default=1.0)
    _add_common(sim)
    registry["simulate"] = sim

    fit = subs.add_parser("fit", help="fit one DAG per group")
    _add_data_options(fit)
    _add_solver_options(fit)
    fit.add_argument("--trace", action="store_true",
                     help="write per-iteration solver diagnostics (trace.jsonl)")
    _add_common(fit)
    registry["fit"] = fit

    ev = subs.add_parser("evaluate", help="compare estimated graphs to the truth")
    ev.add_argument("--estimated", nargs="+", default=None,
                    help="edge-list TSV(s) of estimated graphs")
    ev.add_argument("--truth", nargs="+", default=None,
                    help="edge-list TSV(s) of true graphs, paired in order")
    ev.add_argument("--nodes", default=None,
                    help="node list file fixing the node universe")
    _add_common(ev, seed=False)
    registry["evaluate"] = ev

    me = subs.add_parser("measures", help="directed-network measures of one graph")
    me.add_argument("--graph", default=None, help="edge-list TSV")
    me.add_argument("--nodes", default=None,
                    help="node list file fixing the node universe")
    me.add_argument("--hub-ddof", type=int, choices=(0, 1), default=0,
                    help="0: population SD for the hub cut (default); 1: sample SD")
    _add_common(me, seed=False)
    registry["measures"] = me

    cp = subs.add_parser("compare", help="permutation test between two groups")
    _add_data_options(cp)
    _add_solver_options(cp)
    cp.add_argument("--permutations", "-B", type=int, default=100)
    cp.add_argument("--statistic", choices=("weight", "presence"),
                    default="weight")
    cp.add_argument("--mode", choices=("refit", "screen"), default="refit")
    cp.add_argument("--q", type=float, default=0.05, help="FDR level")
    cp.add_argument("--raw-p", type=float, default=0.01,
                    help="raw p cut applied after FDR (use 1 to disable)")
    _add_common(cp, jobs=True)
    registry["compare"] = cp

    cv = subs.add_parser("cv", help="cross-validate the penalty weights")
    _add_data_options(cv)
    _add_solver_options(cv)
    cv.add_argument("--lambda1-grid", default="1e-3,1e-2,1e-1",
                    help="comma-separated values")
    cv.add_argument("--lambda2-grid", default="0,1e-2,1e-1,1",
                    help="comma-separated values")
    cv.add_argument("--folds", type=int, default=5)
    _add_common(cv, jobs=True)
    registry["cv"] = cv

    rr = subs.add_parser("rerun", help="re-execute a recorded run from its manifest")
    rr.add_argument("manifest", help="path to a *_manifest.json file")
    rr.add_argument("--out-dir", default=None,
                    help="directory for the reproduced outputs")
    registry["rerun"] = rr

    return parser, registry


def _apply_config_defaults(argv, parser, registry):
    """Load --config (flat JSON) and install its values as parser defaults."""
    path = None
    for i, token in enumerate(argv):
        if token == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
        elif token.startswith("--config="):
            path = token.split("=", 1)[1]
    if path is None:
        return
    try:
        with open(path, "r", encoding="utf-8") as fh:
            values = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise DataIngestionError(f"cannot read config file: {exc}", path=path) from exc
    if not isinstance(values, dict):
        raise DataIngestionError("config file must hold a flat JSON object",
                                 path=path)
    normalized = {str(k).replace("-", "_"): v for k, v in values.items()}
    parser.set_defaults(**normalized)
    for sub in registry.values():
        sub.set_defaults(**normalized)


def main(argv=None):
    """Entry point; returns the process exit code."""
    if argv is None:
        argv = sys.argv[1:]
    parser, registry = build_parser()
    try:
        _apply_config_defaults(argv, parser, registry)
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_help(sys.stderr)
            return 1
        return HANDLERS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except InvalidArgumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DataIngestionError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except SolverDivergenceError as exc:
        print(f"solver diverged: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
