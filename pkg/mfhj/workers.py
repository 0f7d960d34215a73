"""
Ordered worker pool. Pure solver calls run in anyio worker threads and results
come back in input order whatever the scheduling.
"""
import sys
from collections.abc import Callable, Iterable
from typing import TypeVar

import anyio
from anyio import CapacityLimiter, to_thread
from loguru import logger

from mfhj.config import WORKERS

if sys.version_info < (3, 11):
    from exceptiongroup import BaseExceptionGroup

T = TypeVar("T")
R = TypeVar("R")


async def _gather(fn: Callable[[T], R], items: list[T], workers: int) -> list[R]:
    results: list[R | None] = [None] * len(items)
    limiter = CapacityLimiter(workers)

    async def run_one(index: int, item: T) -> None:
        results[index] = await to_thread.run_sync(fn, item, limiter=limiter)

    async with anyio.create_task_group() as tg:
        for index, item in enumerate(items):
            tg.start_soon(run_one, index, item)
    return results  # type: ignore[return-value]


def _first_error(group: BaseExceptionGroup) -> BaseException:
    error: BaseException = group
    while isinstance(error, BaseExceptionGroup):
        error = error.exceptions[0]
    return error


def map_ordered(fn: Callable[[T], R], items: Iterable[T], *, workers: int | None = None) -> list[R]:
    """
    ``[fn(item) for item in items]``, spread over ``workers`` threads.

    The first failure is re-raised as itself rather than as an exception group.
    """
    items = list(items)
    workers = WORKERS if workers is None else workers
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    logger.debug("dispatching {} tasks to {} workers", len(items), workers)
    try:
        return anyio.run(_gather, fn, items, workers)
    except BaseExceptionGroup as group:
        raise _first_error(group) from None
