import pytest

from qrelgauge.models import Qrels, Run, RunSet
from qrelgauge.shared_libraries.config import config
from qrelgauge.tools.simulation import SynthConfig, synth_generate


def make_run(system_id, rankings):
    """Run from {qid: [docid, ...]} listed best first; scores descend from the list length."""
    return Run(system_id, {
        qid: tuple((docid, float(len(docs) - i)) for i, docid in enumerate(docs))
        for qid, docs in rankings.items()
    })


def make_runset(runs, strict=True):
    return RunSet.build([make_run(system_id, rankings) for system_id, rankings in runs.items()], strict=strict)


@pytest.fixture(autouse=True)
def _strict_default(monkeypatch):
    # keep QRELGAUGE_STRICT in the environment from leaking into lenient-mode tests
    monkeypatch.setattr(config.parsing, "force_strict", False)
    monkeypatch.setattr(config.parsing, "strict", True)


@pytest.fixture
def tiny_qrels():
    return Qrels({
        "q1": {"a": 1, "b": 1, "c": 0},
        "q2": {"d": 1, "e": 1, "f": 1, "g": 1},
    })


@pytest.fixture
def tiny_runset():
    return make_runset({
        "s1": {"q1": ["a", "b", "x"], "q2": ["d", "e", "f", "g"]},
        "s2": {"q1": ["x", "a", "y"], "q2": ["d", "y", "e", "z"]},
        "s3": {"q1": ["x", "y", "z"], "q2": ["z", "y", "x", "d"]},
    })


@pytest.fixture(scope="session")
def synthetic():
    """12 systems, 200 queries, well separated qualities."""
    cfg = SynthConfig(n_systems=12, n_queries=200, noise=0.25, seed=7)
    return cfg, synth_generate(cfg)


@pytest.fixture(scope="session")
def small_synthetic():
    cfg = SynthConfig(n_systems=5, n_queries=40, evidence_min=3, evidence_max=12,
                      corpus_size=3000, distractors=60, depth=50, seed=11)
    return cfg, synth_generate(cfg)
