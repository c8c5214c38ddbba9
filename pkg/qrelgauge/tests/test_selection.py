import numpy as np
import pytest
from scipy import stats

from qrelgauge.error_handler import ConfigError, MissingMeta, NoRelevant
from qrelgauge.models import DocMeta, Qrels
from qrelgauge.tools.metrics import MetricSpec
from qrelgauge.tools.rankstats import parse_buckets
from qrelgauge.tools.simulation import (
    FallbackMode,
    PolicyKind,
    RankingComparator,
    SelectionPolicy,
    SynthConfig,
    default_policies,
    select_single,
    select_with_outcome,
    single_relevant_study,
    synth_generate,
)

from .conftest import make_runset

RECALL20 = MetricSpec.parse("recall@20")


@pytest.fixture(scope="module")
def separated():
    """Twelve systems with large, even quality gaps and little noise."""
    cfg = SynthConfig(n_systems=12, n_queries=200, evidence_min=5, evidence_max=15,
                      qualities=tuple(np.linspace(0.05, 0.95, 12)), noise=0.1, seed=7)
    return synth_generate(cfg)


@pytest.fixture(scope="module")
def paired_qualities():
    """Six pairs of equal-quality systems, far apart from each other."""
    qualities = tuple(q for q in (0.15, 0.3, 0.45, 0.6, 0.75, 0.9) for _ in range(2))
    cfg = SynthConfig(n_systems=12, n_queries=200, evidence_min=5, evidence_max=15,
                      qualities=qualities, noise=0.25, seed=13)
    return synth_generate(cfg)


def test_policy_parse():
    assert SelectionPolicy.parse("random", trials=10, seed=4) == SelectionPolicy.random(10, 4)
    assert SelectionPolicy.parse("popular").kind is PolicyKind.MOST_POPULAR
    assert SelectionPolicy.parse("system:bm25").selector == "bm25"
    assert SelectionPolicy.parse("system:bm25").label == "system:bm25"
    assert SelectionPolicy.parse("system_based").selector is None
    with pytest.raises(ConfigError):
        SelectionPolicy.parse("oldest")
    with pytest.raises(ConfigError):
        SelectionPolicy.random(0, 1)


def test_every_policy_keeps_exactly_one_relevant_doc(small_synthetic):
    _, (qrels, runset, meta) = small_synthetic
    policies = [SelectionPolicy.random(1, 3), SelectionPolicy.most_popular(), SelectionPolicy.longest(),
                SelectionPolicy.shortest(), SelectionPolicy.system_based(runset.system_ids[0])]
    for policy in policies:
        single = select_single(qrels, policy, meta=meta, runs=runset)
        assert single.queries == qrels.queries
        for qid in qrels.queries:
            chosen = single.relevant_set(qid)
            assert len(chosen) == 1
            assert chosen <= qrels.relevant_set(qid)


def test_singleton_query_always_picks_its_only_doc():
    qrels = Qrels.from_relevant({"q": ["only"]})
    for trial in range(5):
        assert select_single(qrels, SelectionPolicy.random(5, 9), trial=trial).relevant_set("q") == {"only"}


def test_system_based_takes_highest_ranked_relevant_doc():
    qrels = Qrels.from_relevant({"q": ["a", "b", "c"]})
    runs = make_runset({"sel": {"q": ["x", "c", "b"]}})
    single = select_single(qrels, SelectionPolicy.system_based("sel"), runs=runs)
    assert single.relevant_set("q") == {"c"}


def test_system_based_fallback_and_skip():
    qrels = Qrels.from_relevant({"q1": ["a", "b"], "q2": ["m", "k"]})
    runs = make_runset({"sel": {"q1": ["b"], "q2": ["z"]}})
    policy = SelectionPolicy.system_based("sel")

    outcome = select_with_outcome(qrels, policy, runs=runs, fallback=FallbackMode.FALLBACK)
    assert outcome.qrels.relevant_set("q2") == {"k"}
    assert outcome.fallback_queries == ("q2",)

    outcome = select_with_outcome(qrels, policy, runs=runs, fallback="skip")
    assert outcome.qrels.queries == ("q1",)
    assert outcome.skipped_queries == ("q2",)


def test_system_based_needs_selector_run():
    qrels = Qrels.from_relevant({"q": ["a"]})
    with pytest.raises(ConfigError):
        select_single(qrels, SelectionPolicy.system_based("missing"), runs=make_runset({"s": {"q": ["a"]}}))
    with pytest.raises(ConfigError):
        select_single(qrels, SelectionPolicy.system_based())


def test_metadata_policies():
    qrels = Qrels.from_relevant({"q": ["d1", "d2", "d3"]})
    meta = DocMeta({"d1": (600, 48), "d2": (9, 120), "d3": (600, 20)})
    assert select_single(qrels, SelectionPolicy.most_popular(), meta=meta).relevant_set("q") == {"d1"}
    assert select_single(qrels, SelectionPolicy.longest(), meta=meta).relevant_set("q") == {"d2"}
    assert select_single(qrels, SelectionPolicy.shortest(), meta=meta).relevant_set("q") == {"d3"}


def test_metadata_policies_require_metadata():
    qrels = Qrels.from_relevant({"q": ["d1", "d2"]})
    with pytest.raises(MissingMeta):
        select_single(qrels, SelectionPolicy.most_popular())
    with pytest.raises(MissingMeta):
        select_single(qrels, SelectionPolicy.longest(), meta=DocMeta({"d1": (1, 1)}))


def test_query_without_relevant_docs():
    with pytest.raises(NoRelevant):
        select_single(Qrels({"q": {"a": 0}}), SelectionPolicy.random(1, 0))


def test_random_selection_is_seeded():
    qrels = Qrels.from_relevant({f"q{i}": [f"d{j}" for j in range(8)] for i in range(20)})
    policy = SelectionPolicy.random(3, 42)
    assert select_single(qrels, policy, trial=1) == select_single(qrels, policy, trial=1)
    assert select_single(qrels, policy, trial=1) != select_single(qrels, policy, trial=2)


def test_random_selection_is_uniform():
    docs = ["a", "b", "c", "d", "e"]
    qrels = Qrels.from_relevant({"q": docs})
    policy = SelectionPolicy.random(10_000, 2024)
    counts = dict.fromkeys(docs, 0)
    for trial in range(10_000):
        (pick,) = select_single(qrels, policy, trial=trial).relevant_set("q")
        counts[pick] += 1
    # roughly a 5 sigma bound
    assert stats.chisquare(list(counts.values())).pvalue > 1e-6


def test_comparator_excludes_selector(small_synthetic):
    _, (qrels, runset, _) = small_synthetic
    comparator = RankingComparator(runset, qrels, RECALL20)
    selector = runset.system_ids[0]
    single = select_single(qrels, SelectionPolicy.system_based(selector), runs=runset)
    comparison = comparator.compare(single, exclude=selector)
    assert selector not in comparison.ranking.systems
    assert len(comparison.ranking) == len(runset) - 1


def test_full_qrels_reproduce_reference(small_synthetic):
    _, (qrels, runset, _) = small_synthetic
    comparator = RankingComparator(runset, qrels, MetricSpec.parse("ndcg@10"), parse_buckets())
    comparison = comparator.compare(qrels)
    assert comparison.tau == 1.0
    for bucket in comparison.buckets:
        if bucket.n_pairs:
            assert bucket.partial_tau == 1.0
            assert bucket.concordance == 1.0


def test_system_based_study_reports_every_selector(small_synthetic):
    _, (qrels, runset, _) = small_synthetic
    study = single_relevant_study(runset, qrels, [SelectionPolicy.system_based()], RECALL20)
    (result,) = study.policies
    assert [r.selector for r in result.selectors] == list(runset.system_ids)
    assert result.tau == pytest.approx(np.mean([r.tau for r in result.selectors]))
    for selector in result.selectors:
        assert {point.system for point in selector.scores} == set(runset.system_ids)
        assert -1.0 <= selector.tau <= 1.0


def test_identical_runs_give_all_ties():
    rankings = {"q1": ["a", "b"], "q2": ["c", "d"], "q3": ["e", "f"]}
    runset = make_runset({"s1": rankings, "s2": rankings, "s3": rankings})
    qrels = Qrels.from_relevant({"q1": ["a", "b"], "q2": ["d"], "q3": ["e", "x"]})
    study = single_relevant_study(runset, qrels, [SelectionPolicy.random(5, 1)], RECALL20)
    (result,) = study.policies
    assert result.tau == 0.0
    assert result.all_ties


def test_study_is_independent_of_jobs(small_synthetic):
    _, (qrels, runset, meta) = small_synthetic
    policies = default_policies(trials=20, seed=3, with_meta=True)
    buckets = parse_buckets()
    sequential = single_relevant_study(runset, qrels, policies, RECALL20, buckets, meta=meta, jobs=1)
    parallel = single_relevant_study(runset, qrels, policies, RECALL20, buckets, meta=meta, jobs=4)
    assert sequential.model_dump() == parallel.model_dump()
    assert sequential.seed == 3


def test_random_selection_keeps_well_separated_systems_in_order(separated):
    qrels, runset, _ = separated
    study = single_relevant_study(runset, qrels, [SelectionPolicy.random(300, 5)], RECALL20, jobs=4)
    (result,) = study.policies
    assert result.trials == 300
    assert result.error_rate < 5.0
    assert result.tau_std >= 0.0


def test_non_significant_pairs_swap_more_often(paired_qualities):
    qrels, runset, _ = paired_qualities
    buckets = parse_buckets("0-0.01,0.05-1")
    study = single_relevant_study(runset, qrels, [SelectionPolicy.random(100, 8)], RECALL20, buckets, jobs=4)
    significant, loose = study.policies[0].buckets
    assert significant.n_pairs > 0 and loose.n_pairs > 0
    assert loose.error_rate > significant.error_rate


def twin_benchmark(n_queries=200):
    """
    Three levels of two twin systems each. Every query has six relevant docs a1 b1 a2 b2 a3 b3;
    level i systems share the docs of lower levels and each twin adds one of (a_i, b_i). On the
    first query the a-twin also finds b_i, so twins differ in the reference but not significantly.
    """
    found = {
        "A1": ["a1"], "B1": ["b1"],
        "A2": ["a1", "b1", "a2"], "B2": ["a1", "b1", "b2"],
        "A3": ["a1", "b1", "a2", "b2", "a3"], "B3": ["a1", "b1", "a2", "b2", "b3"],
    }
    docs = ["a1", "b1", "a2", "b2", "a3", "b3"]
    qrels = Qrels.from_relevant({f"q{j:03d}": [f"{d}_{j}" for d in docs] for j in range(n_queries)})
    runs = {}
    for system, mine in found.items():
        rankings = {}
        for j in range(n_queries):
            extra = [f"b{system[1]}"] if system[0] == "A" and j == 0 else []
            rankings[f"q{j:03d}"] = [f"{d}_{j}" for d in mine + extra] + [f"junk_{j}"]
        runs[system] = rankings
    return qrels, make_runset(runs)


def test_non_significant_pairs_are_coin_flips():
    qrels, runset = twin_benchmark()
    buckets = parse_buckets("0-0.01,0.05-1")
    study = single_relevant_study(runset, qrels, [SelectionPolicy.random(1000, 6)],
                                  MetricSpec.parse("recall@10"), buckets, jobs=4)
    significant, loose = study.policies[0].buckets
    assert loose.n_pairs == 3
    assert significant.n_pairs == 12
    assert significant.error_rate == 0.0
    assert loose.error_rate == pytest.approx(50.0, abs=5.0)
