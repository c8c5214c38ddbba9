"""
Paired significance testing between systems: t-test, p-value buckets, pair classification
and the "significantly better" relation.
"""

import logging
import math
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy import special

from ...error_handler import ConfigError, NumericalError, TooFewQueries
from ...shared_libraries.config import config
from ..metrics.matrix import MetricMatrix

logger = logging.getLogger(__name__)

Pair = FrozenSet[str]

# spread below this (relative to the largest magnitude) counts as zero variance
ZERO_SPREAD = 1e-12


@dataclass(frozen=True)
class PairBucket:
    """Half-open p-value interval [p_min, p_max); a bucket ending at 1 also holds p = 1."""
    p_min: float
    p_max: float

    def __post_init__(self):
        if not 0.0 <= self.p_min < self.p_max <= 1.0:
            raise ConfigError(f"invalid bucket [{self.p_min}, {self.p_max})")

    def contains(self, p_value: float) -> bool:
        if self.p_min <= p_value < self.p_max:
            return True
        return p_value == self.p_max == 1.0

    @property
    def label(self) -> str:
        return f"[{self.p_min:g},{self.p_max:g})"


def parse_buckets(text: Optional[str] = None) -> Tuple[PairBucket, ...]:
    """Parse ``0-0.01,0.01-0.05,0.05-1`` into disjoint buckets."""
    text = config.analysis.buckets if text is None else text
    buckets = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        try:
            low, high = (float(part) for part in item.split("-"))
        except ValueError:
            raise ConfigError(f"bucket {item!r} is not of the form pmin-pmax") from None
        buckets.append(PairBucket(low, high))
    return check_disjoint(buckets)


def check_disjoint(buckets: Iterable[PairBucket]) -> Tuple[PairBucket, ...]:
    ordered = tuple(sorted(buckets, key=lambda b: b.p_min))
    for left, right in zip(ordered, ordered[1:]):
        if right.p_min < left.p_max:
            raise ConfigError(f"buckets {left.label} and {right.label} overlap")
    return ordered


class TTestResult(NamedTuple):
    statistic: float
    p_value: float
    df: int


def student_t_two_sided(statistic: float, df: int) -> float:
    """Two-sided tail probability P(|T| >= |t|) via the regularized incomplete beta."""
    if math.isinf(statistic):
        return 0.0
    x = df / (df + statistic * statistic)
    p_value = float(special.betainc(df / 2.0, 0.5, x))
    if not math.isfinite(p_value) or p_value < -config.analysis.beta_tolerance or p_value > 1.0 + config.analysis.beta_tolerance:
        raise NumericalError(f"incomplete beta failed for t={statistic}, df={df}")
    return min(max(p_value, 0.0), 1.0)


def paired_t_test(diffs: Sequence[float]) -> TTestResult:
    """
    Two-sided one-sample t-test on per-query differences.

    Zero variance gives (0, 1) for a zero mean and (±inf, 0) otherwise.

    Raises:
        TooFewQueries: fewer than two observations
    """
    values = np.asarray(diffs, dtype=np.float64)
    n = int(values.size)
    if n < 2:
        raise TooFewQueries(f"t-test needs at least 2 observations, got {n}")
    df = n - 1
    mean = float(np.mean(values))

    scale = float(np.max(np.abs(values)))
    if scale == 0.0:
        return TTestResult(0.0, 1.0, df)
    # relative tolerance only, so p does not change when every difference is rescaled
    if float(np.max(values) - np.min(values)) <= ZERO_SPREAD * scale:
        logger.warning(f"Zero-variance differences with mean {mean:.6g}; reporting p = 0")
        return TTestResult(math.copysign(math.inf, mean), 0.0, df)

    sd = float(np.std(values, ddof=1))
    statistic = mean / (sd / math.sqrt(n))
    return TTestResult(statistic, student_t_two_sided(statistic, df), df)


@dataclass(frozen=True)
class PairOutcome:
    better: Optional[str]
    p_value: float
    statistic: float
    bucket: Optional[PairBucket]


@dataclass(frozen=True)
class PairClassification:
    """Unordered system pair -> (better system, p-value, bucket)."""
    systems: Tuple[str, ...]
    outcomes: Dict[Pair, PairOutcome]
    buckets: Tuple[PairBucket, ...] = ()

    def outcome(self, a: str, b: str) -> PairOutcome:
        return self.outcomes[frozenset((a, b))]

    def pairs_in(self, bucket: PairBucket) -> FrozenSet[Pair]:
        return frozenset(pair for pair, outcome in self.outcomes.items() if outcome.bucket == bucket)

    def restrict(self, systems: Iterable[str]) -> "PairClassification":
        keep = set(systems)
        return PairClassification(
            tuple(s for s in self.systems if s in keep),
            {pair: outcome for pair, outcome in self.outcomes.items() if pair <= keep},
            self.buckets,
        )


def classify_pairs(matrix: MetricMatrix, buckets: Sequence[PairBucket] = ()) -> PairClassification:
    """Test every unordered pair of systems on their per-query differences and bucket the p-value."""
    buckets = check_disjoint(buckets)
    means = matrix.means()
    outcomes: Dict[Pair, PairOutcome] = {}
    for (i, a), (j, b) in combinations(enumerate(matrix.systems), 2):
        result = paired_t_test(matrix.values[i] - matrix.values[j])
        if means[a] > means[b]:
            better = a
        elif means[b] > means[a]:
            better = b
        else:
            better = None
        bucket = next((bucket for bucket in buckets if bucket.contains(result.p_value)), None)
        outcomes[frozenset((a, b))] = PairOutcome(better, result.p_value, result.statistic, bucket)
    return PairClassification(matrix.systems, outcomes, tuple(buckets))


@dataclass(frozen=True)
class SignificanceRelation:
    """pi(s1, s2): s1 is significantly better than s2 at level alpha."""
    systems: Tuple[str, ...]
    better: FrozenSet[Tuple[str, str]]
    alpha: float

    def __post_init__(self):
        for s1, s2 in self.better:
            if s1 == s2:
                raise ValueError(f"a system cannot be better than itself: {s1}")
            if (s2, s1) in self.better:
                raise ValueError(f"both {s1}>{s2} and {s2}>{s1} asserted")

    def __call__(self, s1: str, s2: str) -> bool:
        return (s1, s2) in self.better


def significance_relation(
    matrix: MetricMatrix,
    alpha: Optional[float] = None,
    classification: Optional[PairClassification] = None,
) -> SignificanceRelation:
    """Build pi from pairwise t-tests: higher mean and p < alpha."""
    alpha = config.analysis.alpha if alpha is None else alpha
    if not 0.0 < alpha < 1.0:
        raise ConfigError(f"alpha must lie in (0, 1), got {alpha}")
    if classification is None:
        classification = classify_pairs(matrix)
    better = set()
    for pair, outcome in classification.outcomes.items():
        if outcome.better is not None and outcome.p_value < alpha:
            (worse,) = pair - {outcome.better}
            better.add((outcome.better, worse))
    return SignificanceRelation(matrix.systems, frozenset(better), alpha)
