"""
Logarithmic extrapolation of pool coverage over the number of systems and over
pool depth.
"""

import logging
import math
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ...error_handler import ConfigError, DegenerateFit, NumericalError, RangeError
from ...models import Qrels, RunSet
from ...schemas import CoverageCurve, CurvePoint, DepthAnalysis, LogFit
from ...shared_libraries.config import config
from .coverage import EXACT, CoverageTable, expected_coverage_from

logger = logging.getLogger(__name__)


def fit_log(points: Sequence[Tuple[float, float]]) -> LogFit:
    """
    Least-squares fit of y = a + b ln(x).

    Raises:
        DegenerateFit: fewer than two points or a single distinct x
    """
    if len(points) < 2:
        raise DegenerateFit(f"log fit needs at least 2 points, got {len(points)}")
    xs = np.array([p[0] for p in points], dtype=np.float64)
    ys = np.array([p[1] for p in points], dtype=np.float64)
    if np.any(xs < 1.0):
        raise RangeError("log fit needs x >= 1")
    if np.all(xs == xs[0]):
        raise DegenerateFit("log fit needs at least two distinct x values")

    lx = np.log(xs)
    b, a = np.polyfit(lx, ys, 1)
    residuals = ys - (a + b * lx)
    rmse = float(np.sqrt(np.mean(residuals ** 2)))
    max_error = float(np.max(np.abs(residuals)))
    if not all(math.isfinite(v) for v in (a, b, rmse, max_error)):
        raise NumericalError("log fit produced non-finite parameters")
    return LogFit(a=float(a), b=float(b), rmse=rmse, max_error=max_error)


def _curve(points: List[Tuple[int, float]], horizon: int) -> CoverageCurve:
    fit = fit_log(points)
    last = points[-1][0]
    return CoverageCurve(
        points=[CurvePoint(x=x, y=y) for x, y in points],
        fit=fit,
        extrapolated=[CurvePoint(x=x, y=fit.predict(x)) for x in range(last + 1, horizon + 1)],
    )


def extrapolate_systems(
    runset: RunSet,
    qrels: Qrels,
    k: int,
    t_max: int,
    mode: str = EXACT,
    samples: Optional[int] = None,
    seed: Optional[int] = None,
    strict: Optional[bool] = None,
    jobs: Optional[int] = None,
) -> CoverageCurve:
    """C*(t) for t = 1..|S|, its log fit and predictions for t = |S|+1..t_max."""
    jobs = config.workers.jobs if jobs is None else jobs
    n = len(runset)
    if t_max <= n:
        raise ConfigError(f"t_max must exceed the {n} available systems, got {t_max}")
    table = CoverageTable(runset, qrels, k, strict)
    points = []
    for t in range(1, n + 1):
        value = expected_coverage_from(table, t, mode, samples, seed, jobs)
        logger.debug(f"C*({t}) = {value:.6f}")
        points.append((t, value))
    curve = _curve(points, t_max)
    logger.info(
        f"Coverage@{k}: {points[-1][1]:.4f} with {n} systems, predicted "
        f"{curve.fit.predict(t_max):.4f} at {t_max} (rmse {curve.fit.rmse:.2e})"
    )
    return curve


def _min_ranks(runset: RunSet, qid: str, limit: int) -> Dict[str, int]:
    """Best canonical rank (<= limit) of every retrieved doc over all systems."""
    best: Dict[str, int] = {}
    for run in runset:
        for docid, rank in run.ranks(qid).items():
            if rank <= limit and rank < best.get(docid, limit + 1):
                best[docid] = rank
    return best


def depth_analysis(
    runset: RunSet,
    known_qrels: Qrels,
    pool_qrels: Qrels,
    depths: Sequence[int],
    extrapolate_to: int,
) -> DepthAnalysis:
    """
    Relevant documents identified by pooling the top-d of every system, and how many
    of them the known qrels were missing.

    Each relevant pooled doc is credited at its minimum rank over systems, so
    identified(d) counts relevant docs with min-rank <= d. ``new`` excludes docs the
    known qrels already mark relevant.
    """
    depths = [int(d) for d in depths]
    if not depths:
        raise ConfigError("at least one pool depth is required")
    if depths[0] < 0 or any(b <= a for a, b in zip(depths, depths[1:])):
        raise ConfigError(f"depths must be non-negative and strictly ascending: {depths}")
    if extrapolate_to < 1:
        raise ConfigError("extrapolation horizon must be positive")

    queries = sorted(set(runset.query_universe) & set(pool_qrels.entries))
    if not queries:
        raise ConfigError("pool qrels share no queries with the runs")
    deepest = depths[-1]

    identified = [0] * len(depths)
    new = [0] * len(depths)
    pool_size = [0] * len(depths)
    unjudged = 0
    for qid in queries:
        best = _min_ranks(runset, qid, deepest)
        relevant = pool_qrels.relevant_set(qid)
        known = known_qrels.relevant_set(qid) if qid in known_qrels else frozenset()
        unjudged += sum(1 for docid in best if docid not in pool_qrels.entries[qid])
        for i, depth in enumerate(depths):
            pooled = [docid for docid, rank in best.items() if rank <= depth]
            hits = [docid for docid in pooled if docid in relevant]
            pool_size[i] += len(pooled)
            identified[i] += len(hits)
            new[i] += sum(1 for docid in hits if docid not in known)
    if unjudged:
        logger.warning(f"{unjudged} pooled documents at depth {deepest} have no pool judgment; counted as non-relevant")

    known_total = sum(len(known_qrels.relevant_set(q)) for q in queries if q in known_qrels)
    fitted = [(d, i) for d, i in zip(depths, identified) if d > 0]
    fitted_new = [(d, n) for d, n in zip(depths, new) if d > 0]
    identified_curve = _curve([(d, float(v)) for d, v in fitted], extrapolate_to)
    new_curve = _curve([(d, float(v)) for d, v in fitted_new], extrapolate_to)

    horizon_new = max(new_curve.fit.predict(extrapolate_to), 0.0)
    denominator = known_total + horizon_new
    share = known_total / denominator if denominator > 0 else None
    logger.info(
        f"Depth {deepest}: {identified[-1]} relevant identified, {new[-1]} new; "
        f"predicted at {extrapolate_to}: {identified_curve.fit.predict(extrapolate_to):.1f} identified, "
        f"{horizon_new:.1f} new"
    )
    return DepthAnalysis(
        depths=depths,
        identified=identified,
        new=new,
        pool_size=pool_size,
        relevant_fraction=[i / p if p else None for i, p in zip(identified, pool_size)],
        known_total=known_total,
        identified_curve=identified_curve,
        new_curve=new_curve,
        extrapolate_to=extrapolate_to,
        known_share_at_horizon=share,
    )
