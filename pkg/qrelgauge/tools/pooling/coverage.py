"""
Pool coverage: how much of each query's relevant set do the top-k lists of a
set of systems reach, alone and as random subsets of a given size?
"""

import logging
import math
from itertools import combinations
from typing import FrozenSet, List, Optional, Sequence, Tuple

import numpy as np

from ...error_handler import ConfigError, ExactBudgetExceeded, NoCommonQueries, NoRelevant, RangeError
from ...models import Qrels, RunSet, top_k_relevant
from ...shared_libraries.config import config, resolve_strict
from ...shared_libraries.rng import choose_seed, substream
from ...shared_libraries.workers import map_ordered

logger = logging.getLogger(__name__)

EXACT = "exact"
MONTE_CARLO = "monte_carlo"
# Monte Carlo subsets are drawn in fixed-size chunks, one PRNG substream per chunk
MC_CHUNK = 1000


def pool_union(runset: RunSet, qrels: Qrels, qid: str, k: int) -> FrozenSet[str]:
    """J_q(S): relevant docs found in the top-k of any system."""
    found = frozenset()
    for run in runset:
        found |= top_k_relevant(run, qrels, qid, k)
    return found


class CoverageTable:
    """Per-(system, query) relevant-in-top-k sets over the queries with relevant docs."""

    def __init__(self, runset: RunSet, qrels: Qrels, k: int, strict: Optional[bool] = None):
        if k < 0:
            raise ConfigError(f"pool depth must be non-negative, got {k}")
        strict = resolve_strict(strict)
        shared = sorted(set(runset.query_universe) & set(qrels.entries))
        if not shared or not len(runset):
            raise NoCommonQueries("runs and qrels share no queries")

        queries = []
        for qid in shared:
            if qrels.num_relevant(qid) == 0:
                if strict:
                    raise NoRelevant(f"query {qid} has no relevant documents")
                logger.warning(f"Skipping query {qid}: no relevant documents")
                continue
            queries.append(qid)
        if not queries:
            raise NoCommonQueries("no shared query has relevant documents")

        self.k = k
        self.systems: Tuple[str, ...] = runset.system_ids
        self.queries: Tuple[str, ...] = tuple(queries)
        self.sizes: Tuple[int, ...] = tuple(qrels.num_relevant(qid) for qid in queries)
        self.found: List[List[FrozenSet[str]]] = [
            [top_k_relevant(run, qrels, qid, k) for qid in queries] for run in runset
        ]

        # one column per (query, relevant doc), weighted so a full row sums to 1
        columns = {}
        weights = []
        for j, qid in enumerate(queries):
            docs = sorted(qrels.relevant_set(qid))
            for docid in docs:
                columns[(j, docid)] = len(weights)
                weights.append(1.0 / (len(docs) * len(queries)))
        self.weights = np.array(weights, dtype=np.float64)
        self.hits = np.zeros((len(self.systems), len(weights)), dtype=np.float64)
        for i, row in enumerate(self.found):
            for j, docs in enumerate(row):
                for docid in docs:
                    self.hits[i, columns[(j, docid)]] = 1.0

    def subset_coverage(self, subset: Sequence[int]) -> float:
        """C_Q(S') for the systems at positions ``subset``; queries summed in fixed order."""
        total = 0.0
        for j, size in enumerate(self.sizes):
            union = frozenset().union(*(self.found[i][j] for i in subset))
            total += len(union) / size
        return total / len(self.sizes)

    def coverage_of(self, membership: np.ndarray) -> np.ndarray:
        """Coverage of every row of a (subsets x systems) 0/1 membership matrix."""
        covered = (membership @ self.hits) > 0.0
        return covered @ self.weights

    def full_coverage(self) -> float:
        return self.subset_coverage(range(len(self.systems)))


def coverage(runset: RunSet, qrels: Qrels, k: int, strict: Optional[bool] = None) -> float:
    """Mean over queries of |J_q(S)| / |E_q|."""
    return CoverageTable(runset, qrels, k, strict).full_coverage()


def _check_subset_size(table: CoverageTable, t: int) -> None:
    if not 1 <= t <= len(table.systems):
        raise RangeError(f"subset size must lie in [1, {len(table.systems)}], got {t}")


def exact_coverage(table: CoverageTable, t: int, jobs: int = 1) -> float:
    """Average coverage over every size-t subset of systems."""
    _check_subset_size(table, t)
    n_subsets = math.comb(len(table.systems), t)
    budget = config.analysis.exact_subset_budget
    if n_subsets > budget:
        raise ExactBudgetExceeded(
            f"{n_subsets} subsets of size {t} exceed the exact budget of {budget}; use monte_carlo mode"
        )
    values = map_ordered(table.subset_coverage, list(combinations(range(len(table.systems)), t)), jobs)
    return sum(values) / n_subsets


def monte_carlo_coverage(
    table: CoverageTable,
    t: int,
    samples: Optional[int] = None,
    seed: Optional[int] = None,
    jobs: int = 1,
) -> Tuple[float, float]:
    """Mean coverage over sampled size-t subsets and its standard error."""
    _check_subset_size(table, t)
    samples = config.simulation.monte_carlo_samples if samples is None else samples
    if samples < 1:
        raise ConfigError(f"samples must be at least 1, got {samples}")
    seed = choose_seed(config.simulation.seed if seed is None else seed)
    n = len(table.systems)

    def draw(chunk: int) -> np.ndarray:
        size = min(MC_CHUNK, samples - chunk * MC_CHUNK)
        # the first t positions of a random permutation form a uniform size-t subset
        picks = np.argsort(substream(seed, chunk).random((size, n)), axis=1)[:, :t]
        membership = np.zeros((size, n), dtype=np.float64)
        np.put_along_axis(membership, picks, 1.0, axis=1)
        return table.coverage_of(membership)

    values = np.concatenate(map_ordered(draw, range(math.ceil(samples / MC_CHUNK)), jobs))
    stderr = float(np.std(values, ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0
    return float(np.sum(values) / samples), stderr


def expected_coverage(
    runset: RunSet,
    qrels: Qrels,
    k: int,
    t: int,
    mode: str = EXACT,
    samples: Optional[int] = None,
    seed: Optional[int] = None,
    strict: Optional[bool] = None,
    jobs: Optional[int] = None,
) -> float:
    """
    C*_Q(S, t): expected coverage of a uniformly random size-t subset of systems.

    Raises:
        ExactBudgetExceeded: exact mode with more subsets than the configured budget
        RangeError: t outside [1, |S|]
    """
    jobs = config.workers.jobs if jobs is None else jobs
    table = CoverageTable(runset, qrels, k, strict)
    return expected_coverage_from(table, t, mode, samples, seed, jobs)


def expected_coverage_from(
    table: CoverageTable,
    t: int,
    mode: str = EXACT,
    samples: Optional[int] = None,
    seed: Optional[int] = None,
    jobs: int = 1,
) -> float:
    if mode == EXACT:
        return exact_coverage(table, t, jobs)
    if mode == MONTE_CARLO:
        return monte_carlo_coverage(table, t, samples, seed, jobs)[0]
    raise ConfigError(f"unknown coverage mode {mode!r}")
