"""
Metric definitions and the per-(system, query) metric matrix.
"""

import logging
import re
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ...error_handler import ConfigError, NoCommonQueries, NoRelevant
from ...models import Qrels, Run, RunSet, SystemRanking
from ...shared_libraries.config import config, resolve_strict
from ...shared_libraries.workers import map_ordered
from .retrieval import average_precision_at_k, ndcg_at_k, r_precision, recall_at_k

logger = logging.getLogger(__name__)


class MetricKind(str, Enum):
    RECALL = "recall"
    NDCG = "ndcg"
    MAP = "map"
    R_PRECISION = "r_precision"


_ALIASES = {
    "recall": MetricKind.RECALL,
    "ndcg": MetricKind.NDCG,
    "map": MetricKind.MAP,
    "ap": MetricKind.MAP,
    "r_precision": MetricKind.R_PRECISION,
    "rprec": MetricKind.R_PRECISION,
    "r-precision": MetricKind.R_PRECISION,
}

_SPEC_PATTERN = re.compile(r"^\s*([A-Za-z_\-]+)\s*(?:@\s*(\d+))?\s*$")


@dataclass(frozen=True)
class MetricSpec:
    """Metric kind plus cutoff (no cutoff for R-precision)."""
    kind: MetricKind
    k: Optional[int] = None

    def __post_init__(self):
        if self.kind is MetricKind.R_PRECISION:
            if self.k is not None:
                raise ConfigError("r_precision takes no cutoff")
        elif self.k is None or self.k < 1:
            raise ConfigError(f"{self.kind.value} needs a cutoff k >= 1")

    @classmethod
    def parse(cls, text: str) -> "MetricSpec":
        """Parse ``recall@20``, ``ndcg@10``, ``map@100`` or ``r_precision``."""
        match = _SPEC_PATTERN.match(text)
        if not match or match.group(1).lower() not in _ALIASES:
            raise ConfigError(f"unknown metric {text!r}")
        kind = _ALIASES[match.group(1).lower()]
        k = int(match.group(2)) if match.group(2) is not None else None
        return cls(kind, k)

    @property
    def label(self) -> str:
        return self.kind.value if self.k is None else f"{self.kind.value}@{self.k}"

    def value(self, run: Run, qrels: Qrels, qid: str) -> float:
        if self.kind is MetricKind.RECALL:
            return recall_at_k(run, qrels, qid, self.k)
        if self.kind is MetricKind.NDCG:
            return ndcg_at_k(run, qrels, qid, self.k)
        if self.kind is MetricKind.MAP:
            return average_precision_at_k(run, qrels, qid, self.k)
        return r_precision(run, qrels, qid)


@dataclass(frozen=True)
class MetricMatrix:
    """values[i, j] is the metric of systems[i] on queries[j]."""
    systems: Tuple[str, ...]
    queries: Tuple[str, ...]
    values: np.ndarray
    spec: MetricSpec

    def __post_init__(self):
        expected = (len(self.systems), len(self.queries))
        if self.values.shape != expected:
            raise ValueError(f"matrix shape {self.values.shape} does not match {expected}")
        if not np.all(np.isfinite(self.values)) or np.any(self.values < 0.0) or np.any(self.values > 1.0):
            raise ValueError("metric values must lie in [0, 1]")

    def row(self, system: str) -> np.ndarray:
        return self.values[self.systems.index(system)]

    def means(self) -> Dict[str, float]:
        """Per-system mean over queries, summed in fixed query order."""
        return {system: float(np.sum(self.values[i]) / len(self.queries)) for i, system in enumerate(self.systems)}

    def ranking(self) -> SystemRanking:
        return SystemRanking.from_scores(self.means())

    def select(self, systems: Sequence[str]) -> "MetricMatrix":
        rows = [self.systems.index(system) for system in systems]
        return MetricMatrix(tuple(systems), self.queries, self.values[rows], self.spec)


def evaluate(
    runset: RunSet,
    qrels: Qrels,
    spec: MetricSpec,
    strict: Optional[bool] = None,
    jobs: Optional[int] = None,
) -> MetricMatrix:
    """
    Evaluate every system on every shared query.

    Raises:
        NoCommonQueries: runs and qrels share no query (after lenient skipping)
        NoRelevant: a shared query has no relevant documents, in strict mode
    """
    strict = resolve_strict(strict)
    jobs = config.workers.jobs if jobs is None else jobs

    shared = sorted(set(runset.query_universe) & set(qrels.entries))
    if not shared or not len(runset):
        raise NoCommonQueries("runs and qrels share no queries")

    queries: List[str] = []
    for qid in shared:
        if qrels.num_relevant(qid) == 0:
            if strict:
                raise NoRelevant(f"query {qid} has no relevant documents")
            logger.warning(f"Skipping query {qid}: no relevant documents")
            continue
        queries.append(qid)
    if not queries:
        raise NoCommonQueries("no shared query has relevant documents")

    def score_run(run: Run) -> List[float]:
        return [spec.value(run, qrels, qid) for qid in queries]

    rows = map_ordered(score_run, list(runset), jobs)
    return MetricMatrix(runset.system_ids, tuple(queries), np.array(rows, dtype=np.float64), spec)
