import math

import numpy as np
import pytest

from qrelgauge.error_handler import ConfigError, NoCommonQueries, NoRelevant
from qrelgauge.models import Qrels
from qrelgauge.tools.metrics import (
    MetricKind,
    MetricSpec,
    average_precision_at_k,
    evaluate,
    ndcg_at_k,
    r_precision,
    recall_at_k,
)

from .conftest import make_run, make_runset


def run_with_relevant_at(ranks, length=None):
    """A single-query run where the relevant docs r* sit at the given 1-based ranks."""
    length = length or max(ranks)
    docs = [f"r{r}" if r in ranks else f"n{r}" for r in range(1, length + 1)]
    return make_run("s", {"q": docs})


def qrels_for(ranks, extra=0):
    return Qrels.from_relevant({"q": [f"r{r}" for r in ranks] + [f"missing{i}" for i in range(extra)]})


def test_recall():
    run = run_with_relevant_at([1, 2, 3, 4], length=20)
    assert recall_at_k(run, qrels_for([1, 2, 3, 4]), "q", 20) == 1.0
    run = run_with_relevant_at([3, 9], length=20)
    assert recall_at_k(run, qrels_for([3, 9], extra=2), "q", 20) == 0.5
    run = make_run("s", {"q": ["x", "y"]})
    assert recall_at_k(run, Qrels.from_relevant({"q": ["a", "b", "c"]}), "q", 20) == 0.0


def test_ndcg():
    assert ndcg_at_k(run_with_relevant_at([1]), qrels_for([1]), "q", 10) == 1.0
    value = ndcg_at_k(run_with_relevant_at([2]), qrels_for([2]), "q", 5)
    assert value == pytest.approx(1 / math.log2(3), abs=1e-12)
    assert value == pytest.approx(0.63093, abs=1e-5)
    assert ndcg_at_k(run_with_relevant_at([7]), qrels_for([7]), "q", 5) == 0.0


def test_ndcg_is_one_iff_top_positions_relevant():
    qrels = qrels_for([1, 2], extra=3)
    assert ndcg_at_k(run_with_relevant_at([1, 2], length=5), qrels, "q", 2) == 1.0
    assert ndcg_at_k(run_with_relevant_at([1, 3], length=5), qrels, "q", 2) < 1.0


def test_average_precision():
    assert average_precision_at_k(run_with_relevant_at([1, 2]), qrels_for([1, 2]), "q", 10) == 1.0
    assert average_precision_at_k(run_with_relevant_at([2, 4]), qrels_for([2, 4]), "q", 10) == pytest.approx(0.5)
    # two more relevant docs beyond the cutoff still count in the denominator
    value = average_precision_at_k(run_with_relevant_at([1, 3, 12, 15]), qrels_for([1, 3, 12, 15]), "q", 10)
    assert value == pytest.approx((1 + 2 / 3) / 4, abs=1e-12)
    assert value == pytest.approx(0.41667, abs=1e-5)


def test_r_precision():
    assert r_precision(run_with_relevant_at([1, 2, 3]), qrels_for([1, 2, 3]), "q") == 1.0
    assert r_precision(run_with_relevant_at([2], length=10), qrels_for([2], extra=3), "q") == 0.25
    # run shorter than R
    assert r_precision(run_with_relevant_at([1], length=1), qrels_for([1], extra=3), "q") == 0.25


def test_metrics_reject_empty_relevant_set_and_bad_cutoff():
    run = make_run("s", {"q": ["a"]})
    empty = Qrels({"q": {"a": 0}})
    for fn in (recall_at_k, ndcg_at_k, average_precision_at_k):
        with pytest.raises(NoRelevant):
            fn(run, empty, "q", 5)
    with pytest.raises(ValueError):
        recall_at_k(run, Qrels.from_relevant({"q": ["a"]}), "q", 0)


def test_recall_and_ap_monotone_in_k():
    run = run_with_relevant_at([2, 5, 6, 11], length=15)
    qrels = qrels_for([2, 5, 6, 11], extra=1)
    recalls = [recall_at_k(run, qrels, "q", k) for k in range(1, 16)]
    aps = [average_precision_at_k(run, qrels, "q", k) for k in range(1, 16)]
    assert recalls == sorted(recalls)
    assert aps == sorted(aps)


def direct_metrics(ranked, relevant, k):
    """Reference formulas, written independently of the implementation."""
    hits = [1 if d in relevant else 0 for d in ranked]
    top = hits[:k]
    recall = sum(top) / len(relevant)
    dcg = sum(h / math.log2(i + 2) for i, h in enumerate(top))
    idcg = sum(1 / math.log2(i + 2) for i in range(min(len(relevant), k)))
    ap = sum(sum(top[: i + 1]) / (i + 1) for i, h in enumerate(top) if h) / len(relevant)
    r = len(relevant)
    rprec = sum(hits[:r]) / r
    return recall, dcg / idcg, ap, rprec


def test_metric_fixture_matches_direct_formulas():
    fixture = {
        "A": {"q1": ["d1", "x1", "d2", "x2", "d3"], "q2": ["y1", "e1", "y2"], "q3": ["f1", "f2", "z1", "f3"]},
        "B": {"q1": ["x1", "x2", "d3", "d2", "d1"], "q2": ["e1", "y1", "y2"], "q3": ["z1", "f3", "z2", "f1"]},
    }
    relevant = {"q1": {"d1", "d2", "d3", "d4"}, "q2": {"e1"}, "q3": {"f1", "f2", "f3"}}
    qrels = Qrels.from_relevant(relevant)
    for system, rankings in fixture.items():
        run = make_run(system, rankings)
        for qid, ranked in rankings.items():
            for k in (1, 2, 3, 5):
                recall, ndcg, ap, rprec = direct_metrics(ranked, relevant[qid], k)
                assert recall_at_k(run, qrels, qid, k) == pytest.approx(recall, abs=1e-12)
                assert ndcg_at_k(run, qrels, qid, k) == pytest.approx(ndcg, abs=1e-12)
                assert average_precision_at_k(run, qrels, qid, k) == pytest.approx(ap, abs=1e-12)
                assert r_precision(run, qrels, qid) == pytest.approx(rprec, abs=1e-12)


def test_metric_spec_parse():
    assert MetricSpec.parse("recall@20") == MetricSpec(MetricKind.RECALL, 20)
    assert MetricSpec.parse("ndcg@10").label == "ndcg@10"
    assert MetricSpec.parse("rprec") == MetricSpec(MetricKind.R_PRECISION)
    with pytest.raises(ConfigError):
        MetricSpec.parse("precision@5")
    with pytest.raises(ConfigError):
        MetricSpec.parse("recall")


def test_evaluate_single_cell():
    run = make_run("s", {"q": ["a", "x", "b"]})
    runset = make_runset({"s": {"q": ["a", "x", "b"]}})
    qrels = Qrels.from_relevant({"q": ["a", "b", "c"]})
    matrix = evaluate(runset, qrels, MetricSpec.parse("recall@20"))
    assert matrix.values.shape == (1, 1)
    assert matrix.values[0, 0] == recall_at_k(run, qrels, "q", 20)


def test_evaluate_permutation_invariance(tiny_runset, tiny_qrels):
    spec = MetricSpec.parse("ndcg@3")
    matrix = evaluate(tiny_runset, tiny_qrels, spec)
    reversed_set = type(tiny_runset)(tuple(reversed(tiny_runset.runs)), tiny_runset.query_universe)
    other = evaluate(reversed_set, tiny_qrels, spec)
    for system in tiny_runset.system_ids:
        np.testing.assert_array_equal(matrix.row(system), other.row(system))
    assert matrix.means() == other.means()


def test_evaluate_jobs_do_not_change_values(tiny_runset, tiny_qrels):
    spec = MetricSpec.parse("map@3")
    sequential = evaluate(tiny_runset, tiny_qrels, spec, jobs=1)
    parallel = evaluate(tiny_runset, tiny_qrels, spec, jobs=4)
    np.testing.assert_array_equal(sequential.values, parallel.values)


def test_evaluate_no_relevant_strict_and_lenient(tiny_runset):
    qrels = Qrels({"q1": {"a": 1}, "q2": {"d": 0}})
    with pytest.raises(NoRelevant):
        evaluate(tiny_runset, qrels, MetricSpec.parse("recall@2"), strict=True)
    matrix = evaluate(tiny_runset, qrels, MetricSpec.parse("recall@2"), strict=False)
    assert matrix.queries == ("q1",)


def test_evaluate_no_common_queries(tiny_runset):
    with pytest.raises(NoCommonQueries):
        evaluate(tiny_runset, Qrels.from_relevant({"other": ["a"]}), MetricSpec.parse("recall@2"))


def test_means_of_constant_matrix():
    runset = make_runset({"s": {"q1": ["a", "x"], "q2": ["b", "y"]}})
    qrels = Qrels.from_relevant({"q1": ["a", "z"], "q2": ["b", "w"]})
    matrix = evaluate(runset, qrels, MetricSpec.parse("recall@5"))
    assert matrix.means() == {"s": 0.5}
