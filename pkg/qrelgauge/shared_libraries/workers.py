"""Bounded worker fan-out that preserves input order."""

import asyncio
import logging
from typing import Callable, Iterable, List, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


async def _gather_limited(fn: Callable[[T], R], items: List[T], jobs: int) -> List[R]:
    semaphore = asyncio.Semaphore(jobs)  # Limit concurrent work units

    async def limited_task(item: T) -> R:
        async with semaphore:
            return await asyncio.to_thread(fn, item)

    return await asyncio.gather(*(limited_task(item) for item in items))


def map_ordered(fn: Callable[[T], R], items: Iterable[T], jobs: int = 1) -> List[R]:
    """Apply ``fn`` to every item with at most ``jobs`` in flight.

    Results are returned in input order, so any reduction over them is
    independent of the worker count.
    """
    work = list(items)
    if jobs <= 1 or len(work) <= 1:
        return [fn(item) for item in work]
    logger.debug(f"Dispatching {len(work)} work units to {jobs} workers")
    return asyncio.run(_gather_limited(fn, work, jobs))
