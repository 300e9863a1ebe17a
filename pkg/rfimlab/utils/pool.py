"""Ordered fan-out of independent work items over a process pool."""

import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, Iterator, Sequence, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def ordered_map(fn: Callable[[T], R], items: Sequence[T], workers: int = 1) -> Iterator[R]:
    """
    Yield ``fn(item)`` for every item, in input order.

    With more than one worker the items run in separate processes; results are
    still yielded in input order, so downstream output does not depend on the
    worker count. An exception raised for an item surfaces when its turn comes.
    """
    if workers <= 1 or len(items) <= 1:
        for item in items:
            yield fn(item)
        return
    chunksize = max(1, len(items) // (workers * 8))
    logger.debug("dispatching %d items to %d workers (chunksize=%d)", len(items), workers, chunksize)
    executor = ProcessPoolExecutor(max_workers=workers)
    try:
        yield from executor.map(fn, items, chunksize=chunksize)
    except BaseException:
        executor.shutdown(wait=False, cancel_futures=True)
        raise
    executor.shutdown()


def flatten(batches: Iterable[Iterable[R]]) -> Iterator[R]:
    for batch in batches:
        yield from batch
