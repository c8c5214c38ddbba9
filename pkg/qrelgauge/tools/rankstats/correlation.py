"""
Ranking agreement: Kendall-τ, error-rate, partial-τ over chosen pairs, and concordance
of significance relations.
"""

import math
from itertools import combinations, permutations
from typing import Iterable, List, Optional, Tuple

from ...error_handler import EmptyBucket, MismatchedSystems, RangeError, TooFewSystems
from ...models import SystemRanking
from .significance import Pair, SignificanceRelation


def _order(ranking: SystemRanking, a: str, b: str) -> int:
    """+1 if a scores above b, -1 if below, 0 on a tie."""
    sa, sb = ranking.score(a), ranking.score(b)
    return (sa > sb) - (sa < sb)


def pair_counts(r1: SystemRanking, r2: SystemRanking, pairs: Iterable[Pair]) -> Tuple[int, int]:
    """Concordant and discordant counts over the given pairs; tied pairs count as neither."""
    concordant = discordant = 0
    for pair in pairs:
        a, b = sorted(pair)
        product = _order(r1, a, b) * _order(r2, a, b)
        if product > 0:
            concordant += 1
        elif product < 0:
            discordant += 1
    return concordant, discordant


def _check_same_systems(r1: SystemRanking, r2: SystemRanking) -> None:
    if set(r1.systems) != set(r2.systems):
        raise MismatchedSystems(
            f"rankings cover different systems: {sorted(set(r1.systems) ^ set(r2.systems))}"
        )


def all_pairs(systems: Iterable[str]) -> List[Pair]:
    return [frozenset(pair) for pair in combinations(sorted(systems), 2)]


def kendall_tau(r1: SystemRanking, r2: SystemRanking) -> float:
    """(C - D) / (n choose 2)."""
    _check_same_systems(r1, r2)
    n = len(r1)
    if n < 2:
        raise TooFewSystems(f"Kendall-tau needs at least 2 systems, got {n}")
    concordant, discordant = pair_counts(r1, r2, all_pairs(r1.systems))
    return (concordant - discordant) / math.comb(n, 2)


def error_rate(tau: float) -> float:
    """Probability (percent) of a discordant pair: 100 (1 - tau) / 2."""
    if not -1.0 <= tau <= 1.0:
        raise RangeError(f"tau must lie in [-1, 1], got {tau}")
    return 100.0 * (1.0 - tau) / 2.0


def partial_kendall_tau(candidate: SystemRanking, reference: SystemRanking, pairs: Iterable[Pair]) -> float:
    """Kendall-tau restricted to ``pairs``: (C_b - D_b) / |pairs|."""
    pairs = list(pairs)
    if not pairs:
        raise EmptyBucket("no system pairs to compare")
    known = set(candidate.systems) & set(reference.systems)
    for pair in pairs:
        if len(pair) != 2 or not pair <= known:
            raise MismatchedSystems(f"pair {sorted(pair)} not covered by both rankings")
    concordant, discordant = pair_counts(candidate, reference, pairs)
    return (concordant - discordant) / len(pairs)


def discordant_pairs(candidate: SystemRanking, reference: SystemRanking) -> List[Tuple[str, str]]:
    """Pairs (a, b) the reference orders a above b and the candidate orders b above a."""
    _check_same_systems(candidate, reference)
    swapped = []
    for pair in all_pairs(reference.systems):
        a, b = sorted(pair)
        ref, cand = _order(reference, a, b), _order(candidate, a, b)
        if ref * cand < 0:
            swapped.append((a, b) if ref > 0 else (b, a))
    return swapped


def concordance(
    pi1: SignificanceRelation,
    pi2: SignificanceRelation,
    pairs: Optional[Iterable[Pair]] = None,
) -> float:
    """
    Fraction of ordered system pairs on which two relations agree (XNOR).

    With ``pairs``, only the two orderings of each given unordered pair are compared.
    """
    if set(pi1.systems) != set(pi2.systems):
        raise MismatchedSystems("relations cover different systems")
    if pairs is None:
        if len(pi1.systems) < 2:
            raise TooFewSystems("concordance needs at least 2 systems")
        ordered = list(permutations(sorted(pi1.systems), 2))
    else:
        ordered = []
        for pair in pairs:
            a, b = sorted(pair)
            ordered.extend([(a, b), (b, a)])
        if not ordered:
            raise EmptyBucket("no system pairs to compare")
    agree = sum(pi1(s1, s2) == pi2(s1, s2) for s1, s2 in ordered)
    return agree / len(ordered)
