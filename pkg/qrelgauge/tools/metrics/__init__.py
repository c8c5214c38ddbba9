"""
Retrieval metrics and the metric matrix.
"""

from .retrieval import (
    recall_at_k,
    ndcg_at_k,
    average_precision_at_k,
    r_precision,
)

from .matrix import (
    MetricKind,
    MetricSpec,
    MetricMatrix,
    evaluate,
)

__all__ = [
    "recall_at_k",
    "ndcg_at_k",
    "average_precision_at_k",
    "r_precision",
    "MetricKind",
    "MetricSpec",
    "MetricMatrix",
    "evaluate",
]
