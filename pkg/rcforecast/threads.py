"""
threads.py
==========

Ordered worker pool for Monte Carlo blocks and simulator trials.
--------------------------------------------------------------------------------

Tasks are independent and carry their own random stream, so the pool only has
to return results in task order. A single worker runs tasks inline.
"""
import logging
from concurrent.futures import ThreadPoolExecutor


def ordered_map(fn, tasks, workers=1):
    """Apply `fn` to every task, returning results in task order.

    Parameters
    ----------
    fn : callable
        Called as fn(task). Must not depend on shared mutable state.
    tasks : iterable
    workers : int
        Number of threads; values < 1 are treated as 1.

    Returns
    -------
    list
    """
    tasks = list(tasks)
    workers = max(1, int(workers or 1))
    if workers == 1 or len(tasks) < 2:
        return [fn(t) for t in tasks]
    logging.debug("Running %d tasks on %d workers", len(tasks), workers)
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(fn, tasks))
