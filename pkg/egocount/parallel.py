"""Order-preserving map over a process pool whose workers share read-only context
installed by an initializer."""

from __future__ import annotations

import logging
import os
import typing
from concurrent.futures import ProcessPoolExecutor

if typing.TYPE_CHECKING:
    from typing import Any, Callable, Iterable, Sequence

T = typing.TypeVar("T")
R = typing.TypeVar("R")

logger = logging.getLogger(__name__)

WORKERS_ENV = "EGOCOUNT_WORKERS"


def default_workers() -> int:
    value = os.environ.get(WORKERS_ENV)
    if value:
        try:
            return max(1, int(value))
        except ValueError:
            logger.warning("Ignoring %s=%r (not an integer)", WORKERS_ENV, value)
    return os.cpu_count() or 1


def map_ordered(
    func: Callable[[T], R],
    items: Iterable[T],
    workers: int = 1,
    initializer: Callable[..., None] | None = None,
    initargs: Sequence[Any] = (),
    on_result: Callable[[], None] | None = None,
) -> list[R]:
    """`[func(x) for x in items]`, possibly in worker processes. Results always
    come back in input order, so reductions over them do not depend on `workers`.
    `on_result` is called once per finished item."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        if initializer is not None:
            initializer(*initargs)
        results = []
        for item in items:
            results.append(func(item))
            if on_result is not None:
                on_result()
        return results

    chunksize = max(1, len(items) // (workers * 4))
    logger.debug("Mapping %d items over %d workers (chunks of %d)", len(items), workers, chunksize)
    with ProcessPoolExecutor(
        max_workers=workers, initializer=initializer, initargs=tuple(initargs)
    ) as pool:
        results = []
        for result in pool.map(func, items, chunksize=chunksize):
            results.append(result)
            if on_result is not None:
                on_result()
        return results
