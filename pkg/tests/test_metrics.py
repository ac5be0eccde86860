import pytest

import oracles
from conftest import digraph_from_edges
from jointdag import BinaryDigraph, InvalidArgumentError, evaluate


def test_perfect_recovery():
    g = digraph_from_edges(4, [(0, 1), (1, 2), (0, 3)])
    rep = evaluate(g, g)
    assert rep.fdr == 0.0
    assert rep.tpr == 1.0
    assert rep.shd == 0
    assert rep.tp == 3 and rep.fp == 0 and rep.reversed == 0
    assert rep.fn_count == 0


def test_single_reversed_edge():
    truth = digraph_from_edges(2, [(0, 1)])
    est = digraph_from_edges(2, [(1, 0)])
    rep = evaluate(est, truth)
    assert rep.reversed == 1
    assert rep.fp == 0 and rep.tp == 0
    assert rep.extra == 0 and rep.missing == 0
    assert rep.shd == 1
    assert rep.fdr == 1.0
    assert rep.tpr == 0.0


def test_correct_edge_plus_unrelated_extra():
    truth = digraph_from_edges(4, [(0, 1)])
    est = digraph_from_edges(4, [(0, 1), (2, 3)])
    rep = evaluate(est, truth)
    assert rep.n_predicted == 2
    assert rep.fp == 1
    assert rep.fdr == 0.5
    assert rep.tpr == 1.0
    assert rep.shd == 1


def test_mixed_hand_example():
    truth = digraph_from_edges(3, [(0, 1), (1, 2)])
    est = digraph_from_edges(3, [(0, 1), (2, 1), (0, 2)])
    rep = evaluate(est, truth)
    assert rep.tp == 1
    assert rep.reversed == 1
    assert rep.fp == 1
    assert rep.extra == 1
    assert rep.missing == 0
    assert rep.fn_count == 1
    assert rep.fdr == pytest.approx(2.0 / 3.0, rel=1e-15)
    assert rep.tpr == pytest.approx(0.5, rel=1e-15)
    assert rep.shd == 2


def test_empty_prediction_and_empty_truth():
    truth = digraph_from_edges(3, [(0, 1)])
    none = digraph_from_edges(3, [])
    rep = evaluate(none, truth)
    assert rep.fdr == 0.0
    assert rep.tpr == 0.0
    assert rep.missing == 1 and rep.shd == 1

    rep = evaluate(truth, none)
    assert rep.tpr == 1.0
    assert rep.fdr == 1.0
    assert rep.extra == 1 and rep.shd == 1

    rep = evaluate(none, none)
    assert rep.fdr == 0.0 and rep.tpr == 1.0 and rep.shd == 0


def test_counts_match_exhaustive_oracle(rng):
    for _ in range(200):
        d = int(rng.integers(2, 11))
        est = oracles.random_digraph_edges(rng, d, density=0.25)
        tru = oracles.random_digraph_edges(rng, d, density=0.25)
        rep = evaluate(
            BinaryDigraph(d, est), BinaryDigraph(d, tru)
        )
        ref = oracles.classify_pairs(est, tru)
        assert rep.tp == ref["tp"]
        assert rep.reversed == ref["reversed"]
        assert rep.fp == ref["fp"]
        assert rep.extra == ref["extra"]
        assert rep.missing == ref["missing"]
        assert rep.n_predicted == ref["n_predicted"]
        assert rep.n_true == ref["n_true"]
        assert rep.fn_count == ref["n_true"] - ref["tp"]
        p = max(ref["n_predicted"], 1)
        t = max(ref["n_true"], 1)
        expect_fdr = (ref["reversed"] + ref["fp"]) / p if ref["n_predicted"] else 0.0
        expect_tpr = ref["tp"] / t if ref["n_true"] else 1.0
        assert rep.fdr == pytest.approx(expect_fdr, abs=1e-15)
        assert rep.tpr == pytest.approx(expect_tpr, abs=1e-15)
        assert rep.shd == ref["extra"] + ref["missing"] + ref["reversed"]


def test_swapping_arguments_exchanges_skeleton_counts(rng):
    # For DAG pairs (no two-cycles) the skeleton counts mirror and the
    # reversal count is direction-symmetric, so SHD is symmetric too.
    for _ in range(50):
        d = int(rng.integers(2, 9))
        A = oracles.random_dag_matrix(rng, d, density=0.4)
        B = oracles.random_dag_matrix(rng, d, density=0.4)
        ga = digraph_from_edges(d, [(i, j) for i in range(d) for j in range(d) if A[i, j] != 0])
        gb = digraph_from_edges(d, [(i, j) for i in range(d) for j in range(d) if B[i, j] != 0])
        fwd = evaluate(ga, gb)
        bwd = evaluate(gb, ga)
        assert fwd.extra == bwd.missing
        assert fwd.missing == bwd.extra
        assert fwd.reversed == bwd.reversed
        assert fwd.tp == bwd.tp
        assert fwd.shd == bwd.shd


def test_evaluate_rejects_mismatched_graphs():
    with pytest.raises(InvalidArgumentError):
        evaluate(digraph_from_edges(3, []), digraph_from_edges(4, []))
    a = BinaryDigraph(2, frozenset(), node_labels=("u", "v"))
    b = BinaryDigraph(2, frozenset(), node_labels=("v", "u"))
    with pytest.raises(InvalidArgumentError):
        evaluate(a, b)


def test_report_to_dict_round_trip():
    truth = digraph_from_edges(3, [(0, 1), (1, 2)])
    est = digraph_from_edges(3, [(0, 1), (2, 1), (0, 2)])
    d = evaluate(est, truth).to_dict()
    assert d["shd"] == 2
    assert d["fdr"] == pytest.approx(2.0 / 3.0)
    assert set(d) == {
        "tp", "fp", "fn_count", "reversed", "extra", "missing",
        "n_predicted", "n_true", "fdr", "tpr", "shd",
    }
