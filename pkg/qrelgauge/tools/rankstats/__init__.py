"""
Ranking-comparison statistics.
"""

from .significance import (
    PairBucket,
    PairOutcome,
    PairClassification,
    SignificanceRelation,
    TTestResult,
    parse_buckets,
    paired_t_test,
    student_t_two_sided,
    classify_pairs,
    significance_relation,
)

from .correlation import (
    all_pairs,
    kendall_tau,
    error_rate,
    partial_kendall_tau,
    discordant_pairs,
    concordance,
)

__all__ = [
    # Significance
    "PairBucket",
    "PairOutcome",
    "PairClassification",
    "SignificanceRelation",
    "TTestResult",
    "parse_buckets",
    "paired_t_test",
    "student_t_two_sided",
    "classify_pairs",
    "significance_relation",

    # Correlation
    "all_pairs",
    "kendall_tau",
    "error_rate",
    "partial_kendall_tau",
    "discordant_pairs",
    "concordance",
]
