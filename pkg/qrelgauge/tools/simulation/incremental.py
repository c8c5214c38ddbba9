"""
Incremental annotation: how fast does the system ranking stabilize as more of
each query's relevant documents get annotated?
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from ...error_handler import ConfigError
from ...models import Qrels, RunSet
from ...schemas import StabilityCurve, StabilityPoint
from ...shared_libraries.config import config, parse_float_list
from ...shared_libraries.rng import choose_seed, shuffled
from ...shared_libraries.workers import map_ordered
from ..metrics.matrix import MetricSpec
from ..rankstats.significance import PairBucket
from .selection import (
    Comparison,
    FallbackMode,
    RankingComparator,
    SelectionPolicy,
    average_buckets,
    select_with_outcome,
)

logger = logging.getLogger(__name__)


def annotation_quota(fraction: float, n_relevant: int) -> int:
    """ceil(f * |E_q|), never below the seed document."""
    # rounding first keeps 0.3 * 10 from becoming 4
    return max(1, math.ceil(round(fraction * n_relevant, 9)))


def check_fractions(fractions: Sequence[float]) -> Tuple[float, ...]:
    fractions = tuple(float(f) for f in fractions)
    if not fractions:
        raise ConfigError("at least one annotation fraction is required")
    if any(not 0.0 < f <= 1.0 for f in fractions):
        raise ConfigError(f"fractions must lie in (0, 1]: {fractions}")
    if any(b <= a for a, b in zip(fractions, fractions[1:])):
        raise ConfigError(f"fractions must be strictly ascending: {fractions}")
    return fractions


def annotation_orders(
    full_qrels: Qrels,
    seeds: Dict[str, str],
    seed: int,
    repetition: int,
    selector_index: int,
) -> Dict[str, List[str]]:
    """
    Per query: the seed document followed by a random permutation of the other relevant docs.

    A query without a seed (the selector retrieved none of its relevant docs and was
    skipped) is annotated in a fully random order, so every query is complete at f = 1.
    """
    orders = {}
    for index, qid in enumerate(full_qrels.queries):
        relevant = full_qrels.relevant_set(qid)
        first = seeds.get(qid)
        if first is None:
            orders[qid] = shuffled(seed, sorted(relevant), repetition, selector_index, index)
            continue
        rest = sorted(relevant - {first})
        orders[qid] = [first] + shuffled(seed, rest, repetition, selector_index, index)
    return orders


def partial_qrels(orders: Dict[str, List[str]], fraction: float) -> Qrels:
    """Qrels holding the first ceil(f * |E_q|) documents of each order; nested in f."""
    return Qrels.from_relevant({
        qid: order[:annotation_quota(fraction, len(order))] for qid, order in orders.items()
    })


@dataclass(frozen=True)
class _Unit:
    repetition: int
    selector_index: int
    selector: str


def incremental_study(
    runset: RunSet,
    full_qrels: Qrels,
    buckets: Sequence[PairBucket],
    spec: MetricSpec,
    fractions: Optional[Sequence[float]] = None,
    seed: Optional[int] = None,
    selectors: Optional[Sequence[str]] = None,
    repetitions: Optional[int] = None,
    alpha: Optional[float] = None,
    fallback: Optional[FallbackMode] = None,
    exclude_selector: bool = True,
    strict: Optional[bool] = None,
    jobs: Optional[int] = None,
) -> StabilityCurve:
    """
    Grow each selector's single-relevant qrels towards the full qrels and track per-bucket
    partial-τ against the full-qrels ranking.

    Every (repetition, selector) pair is one work unit. Its annotation order per query is
    fixed up front, so the annotated sets are nested across fractions.
    """
    fractions = check_fractions(parse_float_list(config.simulation.fractions) if fractions is None else fractions)
    seed = choose_seed(config.simulation.seed if seed is None else seed)
    repetitions = config.simulation.repetitions if repetitions is None else repetitions
    if repetitions < 1:
        raise ConfigError(f"repetitions must be at least 1, got {repetitions}")
    jobs = config.workers.jobs if jobs is None else jobs

    comparator = RankingComparator(runset, full_qrels, spec, buckets, alpha, strict)
    full_qrels = comparator.qrels
    buckets = comparator.buckets
    if not buckets:
        raise ConfigError("incremental study needs at least one p-value bucket")

    selectors = list(runset.system_ids if not selectors else selectors)
    unknown = [s for s in selectors if s not in runset.system_ids]
    if unknown:
        raise ConfigError(f"unknown selector systems: {', '.join(unknown)}")
    units = [_Unit(rep, i, s) for rep in range(repetitions) for i, s in enumerate(selectors)]
    logger.info(f"Incremental study on {spec.label}: {len(units)} units x {len(fractions)} fractions, seed {seed}")

    def run_unit(unit: _Unit) -> Tuple[List[Comparison], List[int], int]:
        outcome = select_with_outcome(full_qrels, SelectionPolicy.system_based(unit.selector),
                                      runs=runset, fallback=fallback)
        seeds = {qid: next(iter(docs)) for qid, docs in outcome.qrels.entries.items()}
        orders = annotation_orders(full_qrels, seeds, seed, unit.repetition, unit.selector_index)
        exclude = unit.selector if exclude_selector else None
        partials = [partial_qrels(orders, f) for f in fractions]
        compared = [comparator.compare(qrels, exclude=exclude) for qrels in partials]
        return compared, [qrels.total_relevant() for qrels in partials], len(outcome.skipped_queries)

    per_unit = map_ordered(run_unit, units, jobs)
    full_counts = {bucket: len(comparator.classification.pairs_in(bucket)) for bucket in buckets}

    points: List[StabilityPoint] = []
    for position, fraction in enumerate(fractions):
        comparisons = [compared[position] for compared, _, _ in per_unit]
        for result in average_buckets(buckets, comparisons, full_counts):
            points.append(StabilityPoint(fraction=fraction, **result.model_dump()))

    # orders cover every query with all its relevant docs, so counts agree across units
    annotated = per_unit[0][1]
    unseeded = sum(n for _, _, n in per_unit)
    if unseeded:
        logger.info(f"{unseeded} (unit, query) pairs had no selector seed and were annotated in random order")
    return StabilityCurve(
        metric=spec.label,
        seed=seed,
        fractions=list(fractions),
        selectors=selectors,
        repetitions=repetitions,
        annotated=annotated,
        unseeded_queries=unseeded,
        points=points,
    )
