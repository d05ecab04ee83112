"""
Tests for the block scheduler.
"""
import threading
import time

import pytest

from core.manager import BlockScheduler


def slow_square(x):
    # later items finish first
    time.sleep(0.002 * (10 - x))
    return x * x


def test_results_keep_item_order():
    scheduler = BlockScheduler(slow_square, threads=4)
    assert scheduler.run_sync(list(range(10))) == [x * x for x in range(10)]


def test_serial_path_stays_on_caller_thread():
    caller = threading.get_ident()
    seen = BlockScheduler(lambda _: threading.get_ident(), threads=1).run_sync([1, 2, 3])
    assert seen == [caller] * 3


def test_empty_input():
    assert BlockScheduler(slow_square, threads=3).run_sync([]) == []


def test_worker_error_keeps_its_type():
    def worker(x):
        if x == 3:
            raise KeyError(x)
        return x

    with pytest.raises(KeyError):
        BlockScheduler(worker, threads=2).run_sync(list(range(6)))


def test_thread_count_must_be_positive():
    with pytest.raises(ValueError):
        BlockScheduler(slow_square, threads=0)


def test_concurrency_is_capped():
    active, peak = 0, 0
    lock = threading.Lock()

    def worker(_):
        nonlocal active, peak
        with lock:
            active += 1
            peak = max(peak, active)
        time.sleep(0.01)
        with lock:
            active -= 1

    BlockScheduler(worker, threads=2).run_sync(list(range(8)))
    assert 1 <= peak <= 2


@pytest.mark.asyncio
async def test_run_inside_event_loop():
    results = await BlockScheduler(slow_square, threads=3, label="test").run([4, 5, 6])
    assert results == [16, 25, 36]
