"""Depth-first exploration of a forest of i.i.d. branching trees.

The number of activated (discovered, unexplored) nodes is a walk on the
nonnegative integers with unit down-steps. With geometric offspring
``q_k = (1 - beta) beta^k`` it has the general open-TASEP hidden kernel.
"""

from __future__ import annotations

import numpy as np

_CHUNK = 4096


def exploration_walk(beta: float, steps: int, rng: np.random.Generator) -> np.ndarray:
    """Activated-node counts ``zeta_0 = 0, ..., zeta_steps``.

    Each step explores the most recently activated node (a new root when none
    is active) and activates its offspring.
    """
    if not 0 < beta < 1:
        raise ValueError("need 0 < beta < 1")
    out = np.zeros(steps + 1, dtype=np.int64)
    stack: list[int] = []  # depths of activated nodes, top = next to explore
    offspring = rng.geometric(1 - beta, size=_CHUNK) - 1
    used = 0
    for n in range(1, steps + 1):
        depth = stack.pop() + 1 if stack else 1
        if used == _CHUNK:
            offspring = rng.geometric(1 - beta, size=_CHUNK) - 1
            used = 0
        stack.extend([depth] * int(offspring[used]))
        used += 1
        out[n] = len(stack)
    return out


def transition_counts(walk, size: int) -> np.ndarray:
    """Counts of observed steps ``b -> b'`` with both ends below ``size``."""
    w = np.asarray(walk)
    a, b = w[:-1], w[1:]
    keep = (a < size) & (b < size)
    return np.bincount(a[keep] * size + b[keep], minlength=size * size).reshape(size, size)
