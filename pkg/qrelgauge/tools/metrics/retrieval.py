"""
Per-query retrieval metrics with binary relevance, trec_eval conventions.
"""

import math
from typing import FrozenSet, List, Tuple

from ...error_handler import NoRelevant
from ...models import Qrels, Run, top_k_relevant


def _check_cutoff(k: int) -> None:
    if k < 1:
        raise ValueError(f"cutoff must be a positive integer, got {k}")


def _relevant(qrels: Qrels, qid: str) -> FrozenSet[str]:
    relevant = qrels.relevant_set(qid)
    if not relevant:
        raise NoRelevant(f"query {qid} has no relevant documents")
    return relevant


def _relevant_ranks(run: Run, qrels: Qrels, qid: str, k: int) -> Tuple[int, List[int]]:
    """|E_q| and the ascending canonical ranks (<= k) of retrieved relevant documents."""
    relevant = _relevant(qrels, qid)
    ranks = run.ranks(qid)
    hits = sorted(rank for rank in (ranks.get(docid) for docid in relevant) if rank is not None and rank <= k)
    return len(relevant), hits


def recall_at_k(run: Run, qrels: Qrels, qid: str, k: int) -> float:
    """|E_{q,s}| / |E_q| at depth k."""
    _check_cutoff(k)
    relevant = _relevant(qrels, qid)
    return len(top_k_relevant(run, qrels, qid, k)) / len(relevant)


def ndcg_at_k(run: Run, qrels: Qrels, qid: str, k: int) -> float:
    """DCG@k / IDCG@k with binary gains and log2(i + 1) discounts."""
    _check_cutoff(k)
    n_relevant, hits = _relevant_ranks(run, qrels, qid, k)
    dcg = sum(1.0 / math.log2(rank + 1) for rank in hits)
    ideal = sum(1.0 / math.log2(i + 1) for i in range(1, min(n_relevant, k) + 1))
    return dcg / ideal


def average_precision_at_k(run: Run, qrels: Qrels, qid: str, k: int) -> float:
    """Sum of precision at each relevant rank <= k, divided by |E_q| (map_cut)."""
    _check_cutoff(k)
    n_relevant, hits = _relevant_ranks(run, qrels, qid, k)
    return sum(found / rank for found, rank in enumerate(hits, start=1)) / n_relevant


def r_precision(run: Run, qrels: Qrels, qid: str) -> float:
    """Precision at depth R = |E_q|; missing list slots count as non-relevant."""
    n_relevant = len(_relevant(qrels, qid))
    return len(top_k_relevant(run, qrels, qid, n_relevant)) / n_relevant
