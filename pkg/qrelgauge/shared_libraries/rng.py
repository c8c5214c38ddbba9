"""Seeded substream PRNG for reproducible simulations.

Every stochastic work unit draws from its own generator derived from the
study seed and the unit's identity (trial, selector, query, ...), so the
draws do not depend on the order in which units are executed.
"""

import logging
import secrets
from typing import Optional, Sequence

import numpy as np

logger = logging.getLogger(__name__)

SEED_BITS = 63


def choose_seed(seed: Optional[int]) -> int:
    """Return ``seed`` or a freshly drawn one; the caller records it in the report header."""
    if seed is not None:
        if seed < 0:
            raise ValueError(f"seed must be non-negative, got {seed}")
        return int(seed)
    drawn = secrets.randbits(SEED_BITS)
    logger.info(f"No seed supplied, using auto-chosen seed {drawn}")
    return drawn


def substream(seed: int, *key: int) -> np.random.Generator:
    """PCG64 generator for the work unit identified by ``key``."""
    sequence = np.random.SeedSequence(entropy=seed, spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(sequence))


def shuffled(seed: int, items: Sequence[str], *key: int) -> list:
    """Deterministic permutation of ``items`` drawn from the unit's substream."""
    order = substream(seed, *key).permutation(len(items))
    return [items[i] for i in order]
