"""Core data model shared by every analysis: qrels, runs, run sets, document metadata, rankings.

All objects are immutable after construction and safe to read from any number of workers.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, Iterator, Mapping, Optional, Tuple

from .error_handler import DuplicateDoc, DuplicateSystem, MissingQuery, QueryUniverseMismatch, RangeError
from .shared_libraries.config import resolve_strict

logger = logging.getLogger(__name__)

RankedList = Tuple[Tuple[str, float], ...]


@dataclass(frozen=True)
class Qrels:
    """Relevance judgments: query-id -> doc-id -> grade. A doc is relevant iff grade > 0."""

    entries: Mapping[str, Mapping[str, int]]

    def __post_init__(self):
        for qid, judged in self.entries.items():
            if not judged:
                raise ValueError(f"query {qid} has no judged documents")
            for docid, grade in judged.items():
                if grade < 0:
                    raise RangeError(f"negative grade {grade} for ({qid}, {docid})")

    @classmethod
    def from_relevant(cls, relevant: Mapping[str, Iterable[str]]) -> "Qrels":
        """Binary qrels with grade 1 for every listed document."""
        entries = {}
        for qid, docids in relevant.items():
            judged = {docid: 1 for docid in docids}
            if judged:
                entries[qid] = judged
        return cls(entries)

    @property
    def queries(self) -> Tuple[str, ...]:
        return tuple(sorted(self.entries))

    def __contains__(self, qid: str) -> bool:
        return qid in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    @cached_property
    def _relevant(self) -> Dict[str, FrozenSet[str]]:
        return {
            qid: frozenset(docid for docid, grade in judged.items() if grade > 0)
            for qid, judged in self.entries.items()
        }

    def relevant_set(self, qid: str) -> FrozenSet[str]:
        """E_q, the single source of truth for what counts as relevant."""
        try:
            return self._relevant[qid]
        except KeyError:
            raise MissingQuery(f"query {qid} not in qrels") from None

    def grade(self, qid: str, docid: str) -> int:
        return self.entries.get(qid, {}).get(docid, 0)

    def num_relevant(self, qid: str) -> int:
        return len(self.relevant_set(qid))

    def total_relevant(self) -> int:
        return sum(len(docs) for docs in self._relevant.values())

    def restrict(self, queries: Iterable[str]) -> "Qrels":
        keep = set(queries)
        return Qrels({qid: judged for qid, judged in self.entries.items() if qid in keep})


def _canonical_key(entry: Tuple[str, float]) -> Tuple[float, str]:
    docid, score = entry
    return (score, docid)


def canonical_order(entries: Iterable[Tuple[str, float]]) -> RankedList:
    """Score descending, ties broken by doc-id descending (trec_eval)."""
    return tuple(sorted(entries, key=_canonical_key, reverse=True))


@dataclass(frozen=True)
class Run:
    """One system's ranked output: query-id -> ordered (doc-id, score) list."""

    system_id: str
    rankings: Mapping[str, RankedList]

    def __post_init__(self):
        for qid, ranked in self.rankings.items():
            seen = set()
            for docid, _ in ranked:
                if docid in seen:
                    raise DuplicateDoc(f"run {self.system_id}: document {docid} appears twice for query {qid}")
                seen.add(docid)

    @property
    def queries(self) -> FrozenSet[str]:
        return frozenset(self.rankings)

    def ranking(self, qid: str) -> RankedList:
        try:
            return self.rankings[qid]
        except KeyError:
            raise MissingQuery(f"query {qid} not in run {self.system_id}") from None

    @property
    def is_canonical(self) -> bool:
        return all(tuple(ranked) == canonical_order(ranked) for ranked in self.rankings.values())

    @cached_property
    def _rank_index(self) -> Dict[str, Dict[str, int]]:
        # 1-based ranks in canonical order
        return {
            qid: {docid: rank for rank, (docid, _) in enumerate(canonical_order(ranked), start=1)}
            for qid, ranked in self.rankings.items()
        }

    def ranks(self, qid: str) -> Mapping[str, int]:
        if qid not in self.rankings:
            raise MissingQuery(f"query {qid} not in run {self.system_id}")
        return self._rank_index[qid]


def canonicalize(run: Run) -> Run:
    """Sort every per-query list into canonical order. Idempotent."""
    return Run(run.system_id, {qid: canonical_order(ranked) for qid, ranked in run.rankings.items()})


def top_k_relevant(run: Run, qrels: Qrels, qid: str, k: int) -> FrozenSet[str]:
    """E_{q,s}: relevant documents among the first min(k, len) canonical entries."""
    if k < 0:
        raise ValueError(f"cutoff must be non-negative, got {k}")
    relevant = qrels.relevant_set(qid)
    ranks = run.ranks(qid)
    return frozenset(docid for docid in relevant if ranks.get(docid, k + 1) <= k)


@dataclass(frozen=True)
class RunSet:
    """Ordered runs with distinct system-ids sharing a query universe."""

    runs: Tuple[Run, ...]
    query_universe: FrozenSet[str] = field(default=frozenset())

    @classmethod
    def build(cls, runs: Iterable[Run], strict: Optional[bool] = None) -> "RunSet":
        """Canonicalize runs and settle the query universe.

        Strict mode requires identical query sets; lenient mode restricts to the intersection.
        """
        strict = resolve_strict(strict)
        canonical = tuple(canonicalize(run) for run in runs)
        seen = set()
        for run in canonical:
            if run.system_id in seen:
                raise DuplicateSystem(f"system {run.system_id} appears more than once")
            seen.add(run.system_id)

        if not canonical:
            return cls(canonical, frozenset())

        universe = frozenset.intersection(*(run.queries for run in canonical))
        union = frozenset.union(*(run.queries for run in canonical))
        if universe != union:
            if strict:
                odd = sorted(run.system_id for run in canonical if run.queries != union)
                raise QueryUniverseMismatch(
                    f"runs cover different queries ({len(union - universe)} not shared); offending runs: {', '.join(odd)}"
                )
            logger.warning(f"Restricting analyses to {len(universe)} shared queries (dropped {len(union - universe)})")
        return cls(canonical, universe)

    def __iter__(self) -> Iterator[Run]:
        return iter(self.runs)

    def __len__(self) -> int:
        return len(self.runs)

    @property
    def system_ids(self) -> Tuple[str, ...]:
        return tuple(run.system_id for run in self.runs)

    @property
    def queries(self) -> Tuple[str, ...]:
        return tuple(sorted(self.query_universe))

    def run(self, system_id: str) -> Run:
        for run in self.runs:
            if run.system_id == system_id:
                return run
        raise KeyError(f"unknown system {system_id}")


@dataclass(frozen=True)
class DocMeta:
    """Per-document popularity (reference count) and length (word count)."""

    entries: Mapping[str, Tuple[int, int]]

    def __post_init__(self):
        for docid, (popularity, length) in self.entries.items():
            if popularity < 0 or length < 0:
                raise RangeError(f"negative metadata for document {docid}")

    def __contains__(self, docid: str) -> bool:
        return docid in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def popularity(self, docid: str) -> int:
        return self.entries[docid][0]

    def length(self, docid: str) -> int:
        return self.entries[docid][1]


@dataclass(frozen=True)
class SystemRanking:
    """Systems ordered by mean score descending; equal scores ordered by system-id."""

    entries: Tuple[Tuple[str, float], ...]

    def __post_init__(self):
        ids = [system for system, _ in self.entries]
        if len(set(ids)) != len(ids):
            raise DuplicateSystem("system ranking lists a system twice")

    @classmethod
    def from_scores(cls, scores: Mapping[str, float]) -> "SystemRanking":
        return cls(tuple(sorted(scores.items(), key=lambda item: (-item[1], item[0]))))

    @property
    def systems(self) -> Tuple[str, ...]:
        return tuple(system for system, _ in self.entries)

    @cached_property
    def _scores(self) -> Dict[str, float]:
        return dict(self.entries)

    def score(self, system: str) -> float:
        return self._scores[system]

    def __len__(self) -> int:
        return len(self.entries)

    def restrict(self, systems: Iterable[str]) -> "SystemRanking":
        keep = set(systems)
        return SystemRanking(tuple(entry for entry in self.entries if entry[0] in keep))

    def without(self, system: str) -> "SystemRanking":
        return SystemRanking(tuple(entry for entry in self.entries if entry[0] != system))

    @property
    def all_tied(self) -> bool:
        return len({score for _, score in self.entries}) <= 1

    def position(self, system: str) -> int:
        """1-based position in the ranking."""
        return self.systems.index(system) + 1
