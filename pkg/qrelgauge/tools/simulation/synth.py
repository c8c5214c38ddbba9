"""
Synthetic retrieval benchmark with a known system quality order.

Model, per query:
  * a few relevant documents plus distractors are drawn from the corpus;
  * every relevant document has a shared difficulty h ~ U(0, 1), and every
    candidate a shared background score b ~ U(0, 1);
  * a system of quality q "knows" the relevant documents with h < q and scores
    them 1 + (q - h); everything else gets its background score;
  * each system adds its own Gaussian noise and, optionally, a popularity bias.

Without noise a higher-quality system knows a superset of what a lower-quality
one knows, so mean recall at the retrieval depth is monotone in quality.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from ...error_handler import ConfigError
from ...models import DocMeta, Qrels, Run, RunSet
from ...shared_libraries.rng import substream

logger = logging.getLogger(__name__)

# substream namespaces
_META, _QUERY, _SYSTEM = 0, 1, 2


@dataclass
class SynthConfig:
    """Size and difficulty of a synthetic benchmark."""
    n_systems: int = 12
    n_queries: int = 200
    evidence_min: int = 5
    evidence_max: int = 40
    corpus_size: int = 20000
    distractors: int = 150
    depth: int = 100
    noise: float = 0.3
    popularity_bias: float = 0.0
    qualities: Optional[Tuple[float, ...]] = None
    strict_ordering: bool = False
    seed: int = 0

    def __post_init__(self):
        for name in ("n_systems", "n_queries", "evidence_min", "corpus_size", "depth"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be at least 1, got {getattr(self, name)}")
        if self.distractors < 0:
            raise ConfigError("distractors must be non-negative")
        if self.evidence_max < self.evidence_min:
            raise ConfigError("evidence_max must not be below evidence_min")
        if self.evidence_max + self.distractors > self.corpus_size:
            raise ConfigError(
                f"corpus of {self.corpus_size} docs cannot hold {self.evidence_max} evidence "
                f"plus {self.distractors} distractors per query"
            )
        if self.noise < 0.0:
            raise ConfigError("noise must be non-negative")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")
        if self.qualities is not None:
            self.qualities = tuple(float(q) for q in self.qualities)
            if len(self.qualities) != self.n_systems:
                raise ConfigError(f"expected {self.n_systems} quality values, got {len(self.qualities)}")
        if self.strict_ordering and len(set(self.system_qualities())) != self.n_systems:
            raise ConfigError("strict ordering needs distinct quality values")

    def system_qualities(self) -> Tuple[float, ...]:
        if self.qualities is not None:
            return self.qualities
        return tuple(float(q) for q in np.linspace(0.15, 0.85, self.n_systems))

    def system_ids(self) -> List[str]:
        width = max(2, len(str(self.n_systems - 1)))
        return [f"sys{i:0{width}d}" for i in range(self.n_systems)]

    def quality_order(self) -> List[str]:
        """System-ids from best to worst true quality (ties by id)."""
        pairs = zip(self.system_ids(), self.system_qualities())
        return [s for s, _ in sorted(pairs, key=lambda item: (-item[1], item[0]))]


def _doc_id(index: int, corpus_size: int) -> str:
    return f"D{index:0{len(str(corpus_size - 1))}d}"


def _query_id(index: int, n_queries: int) -> str:
    return f"Q{index:0{max(3, len(str(n_queries - 1)))}d}"


def synth_generate(cfg: SynthConfig) -> Tuple[Qrels, RunSet, DocMeta]:
    """Deterministic (qrels, runs, metadata) for ``cfg.seed``."""
    qualities = cfg.system_qualities()
    system_ids = cfg.system_ids()

    meta_rng = substream(cfg.seed, _META)
    popularity = np.minimum(meta_rng.zipf(2.0, size=cfg.corpus_size), 10_000) - 1
    lengths = meta_rng.integers(20, 600, size=cfg.corpus_size)
    pop_norm = np.log1p(popularity) / np.log1p(max(int(popularity.max()), 1))

    relevant: Dict[str, List[str]] = {}
    rankings: List[Dict[str, Tuple[Tuple[str, float], ...]]] = [{} for _ in system_ids]
    used = set()

    for qi in range(cfg.n_queries):
        qid = _query_id(qi, cfg.n_queries)
        rng = substream(cfg.seed, _QUERY, qi)
        n_evidence = int(rng.integers(cfg.evidence_min, cfg.evidence_max + 1))
        docs = rng.choice(cfg.corpus_size, size=n_evidence + cfg.distractors, replace=False)
        difficulty = rng.random(n_evidence)
        background = rng.random(docs.size)
        relevant[qid] = [_doc_id(int(d), cfg.corpus_size) for d in docs[:n_evidence]]
        used.update(int(d) for d in docs)

        for si, quality in enumerate(qualities):
            scores = background.copy()
            scores[:n_evidence] = np.where(difficulty < quality, 1.0 + (quality - difficulty), background[:n_evidence])
            if cfg.noise > 0.0:
                scores = scores + cfg.noise * substream(cfg.seed, _SYSTEM, si, qi).standard_normal(docs.size)
            if cfg.popularity_bias:
                # alternate systems lean towards or away from popular documents
                direction = 1.0 if si % 2 == 0 else -1.0
                scores = scores + direction * cfg.popularity_bias * pop_norm[docs]
            top = np.lexsort((-docs, -scores))[: cfg.depth]
            rankings[si][qid] = tuple((_doc_id(int(docs[j]), cfg.corpus_size), float(scores[j])) for j in top)

    qrels = Qrels.from_relevant(relevant)
    runset = RunSet.build([Run(sid, ranks) for sid, ranks in zip(system_ids, rankings)], strict=True)
    meta = DocMeta({
        _doc_id(d, cfg.corpus_size): (int(popularity[d]), int(lengths[d])) for d in sorted(used)
    })
    logger.info(
        f"Generated {cfg.n_queries} queries, {qrels.total_relevant()} relevant docs, "
        f"{cfg.n_systems} systems (seed {cfg.seed})"
    )
    return qrels, runset, meta
