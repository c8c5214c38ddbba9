import pytest

from qrelgauge.error_handler import (
    DuplicateDoc,
    DuplicateSystem,
    MissingQuery,
    QueryUniverseMismatch,
    RangeError,
)
from qrelgauge.models import DocMeta, Qrels, Run, RunSet, SystemRanking, canonicalize, top_k_relevant

from .conftest import make_run


def test_relevant_set_binarizes_grades():
    qrels = Qrels({"q1": {"a": 2, "b": 0, "c": 1}})
    assert qrels.relevant_set("q1") == {"a", "c"}
    assert qrels.num_relevant("q1") == 2
    assert qrels.grade("q1", "b") == 0
    assert qrels.grade("q1", "zzz") == 0


def test_qrels_rejects_negative_grade_and_unknown_query():
    with pytest.raises(RangeError):
        Qrels({"q1": {"a": -1}})
    with pytest.raises(MissingQuery):
        Qrels({"q1": {"a": 1}}).relevant_set("q2")


def test_canonicalize_sorts_by_score_then_docid_descending():
    run = Run("s", {"q": (("a", 1.0), ("b", 2.0))})
    assert canonicalize(run).rankings["q"] == (("b", 2.0), ("a", 1.0))

    tied = Run("s", {"q": (("a", 1.0), ("b", 1.0))})
    assert canonicalize(tied).rankings["q"] == (("b", 1.0), ("a", 1.0))


def test_canonicalize_is_idempotent():
    run = Run("s", {"q": (("c", 0.5), ("a", 3.0), ("b", 0.5), ("d", 3.0))})
    once = canonicalize(run)
    assert canonicalize(once) == once
    assert sorted(once.rankings["q"]) == sorted(run.rankings["q"])
    assert once.is_canonical


def test_duplicate_doc_in_run():
    with pytest.raises(DuplicateDoc):
        Run("s", {"q": (("a", 1.0), ("a", 0.5))})


def test_top_k_relevant():
    run = make_run("s", {"q1": ["d1", "d2", "d3"]})
    qrels = Qrels.from_relevant({"q1": ["d2", "d9"]})
    assert top_k_relevant(run, qrels, "q1", 3) == {"d2"}
    # k beyond the list
    assert top_k_relevant(run, qrels, "q1", 50) == {"d2"}
    assert top_k_relevant(run, qrels, "q1", 0) == frozenset()


def test_top_k_relevant_is_monotone_in_depth():
    run = make_run("s", {"q1": ["a", "x", "b", "y", "c"]})
    qrels = Qrels.from_relevant({"q1": ["a", "b", "c"]})
    sets = [top_k_relevant(run, qrels, "q1", k) for k in range(6)]
    assert all(small <= big for small, big in zip(sets, sets[1:]))


def test_top_k_relevant_with_no_relevant_docs():
    run = make_run("s", {"q1": ["a", "b"]})
    qrels = Qrels({"q1": {"a": 0}})
    assert top_k_relevant(run, qrels, "q1", 2) == frozenset()


def test_top_k_relevant_missing_query():
    run = make_run("s", {"q1": ["a"]})
    with pytest.raises(MissingQuery):
        top_k_relevant(run, Qrels.from_relevant({"q2": ["a"]}), "q2", 1)


def test_runset_strict_and_lenient_universe():
    runs = [make_run("s1", {"q1": ["a"], "q2": ["b"]}), make_run("s2", {"q1": ["a"]})]
    with pytest.raises(QueryUniverseMismatch):
        RunSet.build(runs, strict=True)
    lenient = RunSet.build(runs, strict=False)
    assert lenient.queries == ("q1",)
    assert lenient.system_ids == ("s1", "s2")


def test_runset_rejects_duplicate_system():
    with pytest.raises(DuplicateSystem):
        RunSet.build([make_run("s", {"q": ["a"]}), make_run("s", {"q": ["b"]})])


def test_system_ranking_orders_by_score_then_id():
    ranking = SystemRanking.from_scores({"b": 0.5, "a": 0.5, "c": 0.9})
    assert ranking.systems == ("c", "a", "b")
    assert ranking.position("a") == 2
    assert ranking.without("c").systems == ("a", "b")
    assert not ranking.all_tied
    assert SystemRanking.from_scores({"a": 0.1, "b": 0.1}).all_tied


def test_doc_meta():
    meta = DocMeta({"d1": (600, 48)})
    assert meta.popularity("d1") == 600
    assert meta.length("d1") == 48
    with pytest.raises(RangeError):
        DocMeta({"d1": (-1, 3)})
