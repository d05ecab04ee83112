"""
Background block scheduler for data-parallel work.
"""
import logging
import sys
from typing import Callable, Generic, List, Optional, Sequence, TypeVar

import anyio
import anyio.to_thread

if sys.version_info < (3, 11):
    from exceptiongroup import BaseExceptionGroup


logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


class BlockScheduler(Generic[T, R]):
    """
    Runs independent work items on worker threads.

    Results are stored by item index and returned in index order, so a
    reduction over them does not depend on the number of threads.
    """

    def __init__(self, worker: Callable[[T], R], threads: int = 1, label: str = "block"):
        """
        Initialize the scheduler.

        Args:
            worker: Blocking function applied to every item
            threads: Maximum number of concurrent worker threads
            label: Name used in log messages
        """
        if threads < 1:
            raise ValueError(f"threads must be positive, got {threads}")
        self.worker = worker
        self.threads = threads
        self.label = label

    async def run(self, items: Sequence[T]) -> List[R]:
        """Process all items and return their results in item order."""
        results: List[Optional[R]] = [None] * len(items)
        limiter = anyio.CapacityLimiter(self.threads)

        async def _process(index: int, item: T):
            try:
                results[index] = await anyio.to_thread.run_sync(self.worker, item, limiter=limiter)
            except Exception as e:
                logger.error(f"{self.label} {index} failed: {e}")
                raise
            logger.debug(f"{self.label} {index + 1}/{len(items)} done")

        try:
            async with anyio.create_task_group() as tg:
                for index, item in enumerate(items):
                    tg.start_soon(_process, index, item)
        except BaseExceptionGroup as group:
            # surface the first worker error with its own type
            raise group.exceptions[0] from None

        logger.info(f"Processed {len(items)} {self.label}(s) on {self.threads} thread(s)")
        return results  # type: ignore[return-value]

    def run_sync(self, items: Sequence[T]) -> List[R]:
        """Blocking wrapper around run()."""
        if self.threads == 1 or len(items) <= 1:
            return [self.worker(item) for item in items]
        return anyio.run(self.run, items)
