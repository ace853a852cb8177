import logging
import os
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Callable, Iterable, Optional, TypeVar

T = TypeVar("T")

DEFAULT_JOBS = int(os.getenv("WALLCROSS_JOBS", "1") or 1)


def resolve_jobs(jobs: Optional[int]) -> int:
    """Worker count: explicit value, else WALLCROSS_JOBS; 0 means one per CPU."""
    if jobs is None:
        jobs = DEFAULT_JOBS
    if jobs <= 0:
        jobs = os.cpu_count() or 1
    return jobs


def parallel_reduce(
    fn: Callable[[T], object],
    tasks: Iterable[T],
    jobs: Optional[int] = None,
    start=0,
):
    """Sum fn(task) over tasks, on a thread pool when jobs > 1.

    Results are exact, so the order in which workers finish does not matter.
    """
    jobs = resolve_jobs(jobs)
    tasks = list(tasks)
    total = start
    if jobs == 1 or len(tasks) <= 1:
        for task in tasks:
            total = total + fn(task)
        return total

    with ThreadPoolExecutor(max_workers=jobs) as executor:
        futures = {executor.submit(fn, task): i for i, task in enumerate(tasks)}
        for future in as_completed(futures):
            try:
                total = total + future.result()
            except Exception:
                logging.exception(f"Worker failed on task {futures[future]}")
                raise
    return total
