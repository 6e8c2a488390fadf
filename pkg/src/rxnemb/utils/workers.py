"""Bounded worker pool with input-ordered results."""

from functools import partial
from typing import Callable, List, Sequence, TypeVar

import anyio
import anyio.to_thread
import structlog

T = TypeVar("T")
R = TypeVar("R")

logger = structlog.get_logger()


async def _map_ordered(fn: Callable[[T], R], items: Sequence[T], max_workers: int) -> List[R]:
    limiter = anyio.CapacityLimiter(max_workers)
    results: List[R] = [None] * len(items)  # type: ignore[list-item]

    async def run(index: int, item: T) -> None:
        results[index] = await anyio.to_thread.run_sync(partial(fn, item), limiter=limiter)

    async with anyio.create_task_group() as tg:
        for index, item in enumerate(items):
            tg.start_soon(run, index, item)
    return results


def map_ordered(fn: Callable[[T], R], items: Sequence[T], max_workers: int = 1) -> List[R]:
    """Apply ``fn`` to every item on up to ``max_workers`` threads.

    Results come back in input order. With one worker (or one item) everything
    runs inline. The first exception raised by ``fn`` propagates.
    """
    items = list(items)
    if max_workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]

    logger.debug("worker_pool_started", items=len(items), workers=max_workers)
    try:
        return anyio.run(_map_ordered, fn, items, max_workers)
    except BaseExceptionGroup as group:
        first: BaseException = group
        while isinstance(first, BaseExceptionGroup):
            first = first.exceptions[0]
        raise first from None
