"""
Integer allocation of training examples to tasks
"""

import math
from typing import Optional, Sequence

import numpy as np

from config.enums import AllocationMode
from models.errors import InvalidSetupError

# guards floor(n * pi) against representation error, e.g. 0.29 * 100
_FLOOR_GUARD = 1e-9


def apportion(n: int, fractions: Sequence[float], mode: AllocationMode = AllocationMode.ORDERED,
              rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """Split n examples into integer per-task counts.

    Ordered mode uses n_2 = floor(n pi_2), n_1 = n - n_2 for two tasks and
    largest-remainder apportionment otherwise, with ties going to the
    lower task index (so equal fractions fill tasks in order 1, ..., T).
    Random mode assigns every example to a task drawn from the fractions.
    """
    if n < 0 or int(n) != n:
        raise InvalidSetupError(f"example count must be a non-negative integer, got {n}")
    n = int(n)
    fractions = np.asarray(fractions, dtype=float).ravel()
    if fractions.size == 0 or np.any(fractions < 0) or abs(fractions.sum() - 1.0) > 1e-9:
        raise InvalidSetupError(f"fractions must be non-negative and sum to 1, got {fractions.tolist()}")

    mode = AllocationMode(mode)
    if mode == AllocationMode.RANDOM:
        if rng is None:
            raise InvalidSetupError("random allocation needs a generator")
        return rng.multinomial(n, fractions / fractions.sum()).astype(int)

    if fractions.size == 2:
        n2 = int(math.floor(n * fractions[1] + _FLOOR_GUARD))
        return np.array([n - n2, n2], dtype=int)

    quotas = n * fractions
    counts = np.floor(quotas + _FLOOR_GUARD).astype(int)
    counts = np.minimum(counts, n)
    remaining = n - int(counts.sum())
    if remaining > 0:
        remainders = np.maximum(quotas - counts, 0.0)
        # stable sort keeps task order among equal remainders
        order = np.argsort(-remainders, kind="stable")
        counts[order[:remaining]] += 1
    return counts


def labels_from_counts(counts: Sequence[int]) -> np.ndarray:
    """Task label per example, tasks in order 0, ..., T-1"""
    counts = np.asarray(counts, dtype=int)
    return np.repeat(np.arange(counts.size), counts)
