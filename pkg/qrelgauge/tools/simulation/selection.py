"""
Single-relevant selection policies and the single-relevant stability study.

A policy keeps exactly one relevant document per query; the study re-ranks every
system on the reduced qrels and compares the ranking against the full-qrels one.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ...error_handler import ConfigError, MissingMeta, NoRelevant
from ...models import DocMeta, Qrels, RunSet, SystemRanking
from ...schemas import BucketResult, PolicyResult, SelectionStudy, SelectorResult, SwapPoint
from ...shared_libraries.config import config, resolve_strict
from ...shared_libraries.rng import choose_seed, substream
from ...shared_libraries.workers import map_ordered
from ..metrics.matrix import MetricMatrix, MetricSpec, evaluate
from ..rankstats.correlation import concordance, error_rate, kendall_tau, partial_kendall_tau
from ..rankstats.significance import (
    PairBucket,
    PairClassification,
    SignificanceRelation,
    check_disjoint,
    classify_pairs,
    significance_relation,
)

logger = logging.getLogger(__name__)


class PolicyKind(str, Enum):
    RANDOM = "random"
    MOST_POPULAR = "most_popular"
    LONGEST = "longest"
    SHORTEST = "shortest"
    SYSTEM_BASED = "system_based"


class FallbackMode(str, Enum):
    """What SystemBased does when the selector retrieved no relevant doc for a query."""
    FALLBACK = "fallback"  # lexicographically smallest relevant doc, counted
    SKIP = "skip"          # drop the query


@dataclass(frozen=True)
class SelectionPolicy:
    """How the single annotated document is picked. SystemBased without a selector means every system in turn."""
    kind: PolicyKind
    trials: int = 1
    seed: int = 0
    selector: Optional[str] = None

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError(f"trials must be at least 1, got {self.trials}")

    @classmethod
    def random(cls, trials: int, seed: int) -> "SelectionPolicy":
        return cls(PolicyKind.RANDOM, trials=trials, seed=seed)

    @classmethod
    def most_popular(cls) -> "SelectionPolicy":
        return cls(PolicyKind.MOST_POPULAR)

    @classmethod
    def longest(cls) -> "SelectionPolicy":
        return cls(PolicyKind.LONGEST)

    @classmethod
    def shortest(cls) -> "SelectionPolicy":
        return cls(PolicyKind.SHORTEST)

    @classmethod
    def system_based(cls, selector: Optional[str] = None) -> "SelectionPolicy":
        return cls(PolicyKind.SYSTEM_BASED, selector=selector)

    @classmethod
    def parse(cls, text: str, trials: int = 1, seed: int = 0) -> "SelectionPolicy":
        """``random``, ``most_popular``, ``longest``, ``shortest``, ``system_based`` or ``system:<id>``."""
        name = text.strip()
        if name.startswith("system:"):
            return cls.system_based(name.split(":", 1)[1])
        aliases = {"popular": PolicyKind.MOST_POPULAR, "most-popular": PolicyKind.MOST_POPULAR, "system": PolicyKind.SYSTEM_BASED}
        try:
            kind = aliases.get(name.lower()) or PolicyKind(name.lower())
        except ValueError:
            raise ConfigError(f"unknown selection policy {text!r}") from None
        if kind is PolicyKind.RANDOM:
            return cls.random(trials, seed)
        return cls(kind)

    @property
    def label(self) -> str:
        if self.kind is PolicyKind.SYSTEM_BASED and self.selector is not None:
            return f"system:{self.selector}"
        return self.kind.value

    @property
    def needs_meta(self) -> bool:
        return self.kind in (PolicyKind.MOST_POPULAR, PolicyKind.LONGEST, PolicyKind.SHORTEST)


@dataclass(frozen=True)
class SelectionOutcome:
    qrels: Qrels
    fallback_queries: Tuple[str, ...] = ()
    skipped_queries: Tuple[str, ...] = ()


def _check_meta(meta: Optional[DocMeta], docids: Sequence[str], policy: SelectionPolicy) -> DocMeta:
    if meta is None:
        raise MissingMeta(f"policy {policy.label} needs document metadata")
    missing = [docid for docid in docids if docid not in meta]
    if missing:
        raise MissingMeta(f"policy {policy.label}: no metadata for {len(missing)} relevant docs (e.g. {missing[0]})")
    return meta


def select_with_outcome(
    full_qrels: Qrels,
    policy: SelectionPolicy,
    meta: Optional[DocMeta] = None,
    runs: Optional[RunSet] = None,
    trial: int = 0,
    fallback: Optional[FallbackMode] = None,
) -> SelectionOutcome:
    """Pick one relevant document per query and report fallbacks and skips."""
    fallback = FallbackMode(config.analysis.system_based_fallback) if fallback is None else FallbackMode(fallback)
    selector_run = None
    if policy.kind is PolicyKind.SYSTEM_BASED:
        if policy.selector is None:
            raise ConfigError("system-based selection needs a concrete selector system")
        if runs is None or policy.selector not in runs.system_ids:
            raise ConfigError(f"selector run {policy.selector} not supplied")
        selector_run = runs.run(policy.selector)

    chosen: Dict[str, List[str]] = {}
    fallbacks: List[str] = []
    skipped: List[str] = []
    for index, qid in enumerate(full_qrels.queries):
        relevant = sorted(full_qrels.relevant_set(qid))
        if not relevant:
            raise NoRelevant(f"query {qid} has no relevant documents to select from")

        if policy.kind is PolicyKind.RANDOM:
            pick = relevant[int(substream(policy.seed, trial, index).integers(len(relevant)))]
        elif policy.kind is PolicyKind.MOST_POPULAR:
            meta = _check_meta(meta, relevant, policy)
            pick = min(relevant, key=lambda d: (-meta.popularity(d), d))
        elif policy.kind is PolicyKind.LONGEST:
            meta = _check_meta(meta, relevant, policy)
            pick = min(relevant, key=lambda d: (-meta.length(d), d))
        elif policy.kind is PolicyKind.SHORTEST:
            meta = _check_meta(meta, relevant, policy)
            pick = min(relevant, key=lambda d: (meta.length(d), d))
        else:
            ranks = selector_run.ranks(qid) if qid in selector_run.queries else {}
            hits = [(ranks[d], d) for d in relevant if d in ranks]
            if hits:
                pick = min(hits)[1]
            elif fallback is FallbackMode.SKIP:
                skipped.append(qid)
                continue
            else:
                fallbacks.append(qid)
                pick = relevant[0]
        chosen[qid] = [pick]

    if fallbacks:
        logger.info(f"{policy.label}: {len(fallbacks)} queries fell back to the smallest relevant doc-id")
    if skipped:
        logger.info(f"{policy.label}: skipped {len(skipped)} queries with no retrieved relevant doc")
    return SelectionOutcome(Qrels.from_relevant(chosen), tuple(fallbacks), tuple(skipped))


def select_single(
    full_qrels: Qrels,
    policy: SelectionPolicy,
    meta: Optional[DocMeta] = None,
    runs: Optional[RunSet] = None,
    trial: int = 0,
    fallback: Optional[FallbackMode] = None,
) -> Qrels:
    """Qrels with exactly one relevant document per retained query."""
    return select_with_outcome(full_qrels, policy, meta, runs, trial, fallback).qrels


@dataclass(frozen=True)
class BucketComparison:
    bucket: PairBucket
    n_pairs: int
    partial_tau: Optional[float]
    concordance: Optional[float]


@dataclass(frozen=True)
class Comparison:
    """A candidate ranking scored against the reference."""
    tau: float
    all_ties: bool
    buckets: Tuple[BucketComparison, ...]
    ranking: SystemRanking


class RankingComparator:
    """Holds the full-qrels reference and compares candidate qrels against it."""

    def __init__(
        self,
        runset: RunSet,
        full_qrels: Qrels,
        spec: MetricSpec,
        buckets: Sequence[PairBucket] = (),
        alpha: Optional[float] = None,
        strict: Optional[bool] = None,
    ):
        self.runset = runset
        self.spec = spec
        self.strict = resolve_strict(strict)
        self.alpha = config.analysis.alpha if alpha is None else alpha
        self.buckets = check_disjoint(buckets)
        self.reference_matrix: MetricMatrix = evaluate(runset, full_qrels, spec, strict=self.strict, jobs=1)
        # queries the reference was actually scored on
        self.qrels = full_qrels.restrict(self.reference_matrix.queries)
        self.reference: SystemRanking = self.reference_matrix.ranking()
        self.classification: PairClassification = classify_pairs(self.reference_matrix, self.buckets)
        self.reference_relation: SignificanceRelation = significance_relation(
            self.reference_matrix, self.alpha, self.classification
        )

    def candidate_matrix(self, qrels: Qrels) -> MetricMatrix:
        return evaluate(self.runset, qrels, self.spec, strict=self.strict, jobs=1)

    def compare(self, qrels: Qrels, exclude: Optional[str] = None) -> Comparison:
        matrix = self.candidate_matrix(qrels)
        return self.compare_matrix(matrix, exclude)

    def compare_matrix(self, matrix: MetricMatrix, exclude: Optional[str] = None) -> Comparison:
        systems = [s for s in matrix.systems if s != exclude]
        if exclude is not None:
            matrix = matrix.select(systems)
        candidate = matrix.ranking()
        reference = self.reference.restrict(systems)
        all_ties = candidate.all_tied or reference.all_tied
        tau = kendall_tau(candidate, reference)

        bucket_results = []
        if self.buckets:
            classification = self.classification.restrict(systems)
            candidate_relation = significance_relation(matrix, self.alpha)
            reference_relation = _restrict_relation(self.reference_relation, systems)
            for bucket in self.buckets:
                pairs = classification.pairs_in(bucket)
                if not pairs:
                    bucket_results.append(BucketComparison(bucket, 0, None, None))
                    continue
                bucket_results.append(BucketComparison(
                    bucket,
                    len(pairs),
                    partial_kendall_tau(candidate, reference, pairs),
                    concordance(candidate_relation, reference_relation, pairs),
                ))
        return Comparison(tau, all_ties, tuple(bucket_results), candidate)


def _restrict_relation(relation: SignificanceRelation, systems: Sequence[str]) -> SignificanceRelation:
    keep = set(systems)
    return SignificanceRelation(
        tuple(s for s in relation.systems if s in keep),
        frozenset(pair for pair in relation.better if set(pair) <= keep),
        relation.alpha,
    )


def _mean(values: Sequence[float]) -> Optional[float]:
    return float(np.mean(values)) if values else None


def average_buckets(
    buckets: Sequence[PairBucket],
    comparisons: Sequence[Comparison],
    n_pairs: Optional[Dict[PairBucket, int]] = None,
) -> List[BucketResult]:
    """Average per-bucket partial-τ and concordance across comparisons, ignoring empty buckets."""
    results = []
    for index, bucket in enumerate(buckets):
        entries = [c.buckets[index] for c in comparisons if c.buckets]
        taus = [e.partial_tau for e in entries if e.partial_tau is not None]
        concs = [e.concordance for e in entries if e.concordance is not None]
        mean_tau = _mean(taus)
        count = n_pairs[bucket] if n_pairs is not None else (entries[0].n_pairs if entries else 0)
        results.append(BucketResult(
            p_min=bucket.p_min,
            p_max=bucket.p_max,
            n_pairs=count,
            partial_tau=mean_tau,
            error_rate=error_rate(mean_tau) if mean_tau is not None else None,
            concordance=_mean(concs),
        ))
    return results


def _selector_result(selector: str, comparison: Comparison, outcome: SelectionOutcome,
                     buckets: Sequence[PairBucket], matrix: MetricMatrix) -> SelectorResult:
    ranking = matrix.ranking()
    return SelectorResult(
        selector=selector,
        tau=comparison.tau,
        error_rate=error_rate(comparison.tau),
        all_ties=comparison.all_ties,
        fallback_queries=len(outcome.fallback_queries),
        skipped_queries=len(outcome.skipped_queries),
        buckets=average_buckets(buckets, [comparison]),
        scores=[SwapPoint(system=s, score=score, rank=ranking.position(s)) for s, score in matrix.means().items()],
    )


def single_relevant_study(
    runset: RunSet,
    full_qrels: Qrels,
    policies: Sequence[SelectionPolicy],
    spec: MetricSpec,
    buckets: Sequence[PairBucket] = (),
    meta: Optional[DocMeta] = None,
    alpha: Optional[float] = None,
    fallback: Optional[FallbackMode] = None,
    strict: Optional[bool] = None,
    jobs: Optional[int] = None,
) -> SelectionStudy:
    """
    Compare the full-qrels system ranking against rankings formed on single-relevant qrels.

    Random policies average over trials (mean ± std of τ). SystemBased policies
    leave the selector out of its own comparison and average over selectors.
    """
    jobs = config.workers.jobs if jobs is None else jobs
    comparator = RankingComparator(runset, full_qrels, spec, buckets, alpha, strict)
    full_qrels = comparator.qrels
    buckets = comparator.buckets
    full_counts = {bucket: len(comparator.classification.pairs_in(bucket)) for bucket in buckets}
    seeds = sorted({p.seed for p in policies if p.kind is PolicyKind.RANDOM})

    results: List[PolicyResult] = []
    for policy in policies:
        logger.info(f"Single-relevant study: policy {policy.label} on {spec.label}")

        if policy.kind is PolicyKind.RANDOM:
            def run_trial(trial: int, policy=policy) -> Comparison:
                qrels = select_single(full_qrels, policy, trial=trial)
                return comparator.compare(qrels)

            comparisons = map_ordered(run_trial, range(policy.trials), jobs)
            taus = [c.tau for c in comparisons]
            mean_tau = float(np.mean(taus))
            results.append(PolicyResult(
                policy=policy.label,
                tau=mean_tau,
                tau_std=float(np.std(taus, ddof=0)),
                error_rate=error_rate(mean_tau),
                trials=policy.trials,
                all_ties=all(c.all_ties for c in comparisons),
                buckets=average_buckets(buckets, comparisons, full_counts),
            ))

        elif policy.kind is PolicyKind.SYSTEM_BASED:
            selectors = [policy.selector] if policy.selector is not None else list(runset.system_ids)

            def run_selector(selector: str) -> Tuple[Comparison, SelectorResult]:
                outcome = select_with_outcome(full_qrels, SelectionPolicy.system_based(selector),
                                              runs=runset, fallback=fallback)
                matrix = comparator.candidate_matrix(outcome.qrels)
                comparison = comparator.compare_matrix(matrix, exclude=selector)
                return comparison, _selector_result(selector, comparison, outcome, buckets, matrix)

            pairs = map_ordered(run_selector, selectors, jobs)
            comparisons = [comparison for comparison, _ in pairs]
            per_selector = [result for _, result in pairs]
            mean_tau = float(np.mean([r.tau for r in per_selector]))
            results.append(PolicyResult(
                policy=policy.label,
                tau=mean_tau,
                error_rate=error_rate(mean_tau),
                all_ties=all(r.all_ties for r in per_selector),
                fallback_queries=sum(r.fallback_queries for r in per_selector),
                buckets=average_buckets(buckets, comparisons, full_counts),
                selectors=per_selector,
            ))

        else:
            outcome = select_with_outcome(full_qrels, policy, meta=meta)
            comparison = comparator.compare(outcome.qrels)
            results.append(PolicyResult(
                policy=policy.label,
                tau=comparison.tau,
                error_rate=error_rate(comparison.tau),
                all_ties=comparison.all_ties,
                buckets=average_buckets(buckets, [comparison], full_counts),
            ))

    return SelectionStudy(
        metric=spec.label,
        seed=seeds[0] if seeds else None,
        reference=[list(entry) for entry in comparator.reference.entries],
        bucket_edges=[[b.p_min, b.p_max] for b in buckets],
        policies=results,
    )


def default_policies(trials: Optional[int] = None, seed: Optional[int] = None, with_meta: bool = True) -> List[SelectionPolicy]:
    """Random, the three metadata-biased policies (when metadata exists) and SystemBased over all systems."""
    trials = config.simulation.trials if trials is None else trials
    seed = choose_seed(config.simulation.seed if seed is None else seed)
    policies = [SelectionPolicy.random(trials, seed)]
    if with_meta:
        policies += [SelectionPolicy.most_popular(), SelectionPolicy.longest(), SelectionPolicy.shortest()]
    policies.append(SelectionPolicy.system_based())
    return policies
