"""Two-lines ensemble for the open TASEP and the shift identities linking it to the bridge.

A pair of right-up walks ``s1, s2`` with increments in ``{0, 1}`` starts at 0.
The increments of ``s1`` are the particle word; ``xi = s1 - s2`` is a lazy
walk on the integers whose translates, summed, give the case-1 hidden bridge.
"""

from __future__ import annotations

import math

import numpy as np

from ..bridge import backward_table
from ..errors import TailNotSummable, TooLarge
from ..oracle import ExactDistribution, all_words
from .tasep import TasepParams, tasep_case1_mixture

MAX_N = 9


def _rates(p: TasepParams) -> tuple[float, float]:
    """``s = (1-alpha)/alpha`` and ``t = (1-beta)/beta``; their product is the min-weight ratio."""
    if p.alpha + p.beta <= 1:
        raise TailNotSummable("the two-lines ensemble needs alpha + beta > 1")
    return (1 - p.alpha) / p.alpha, (1 - p.beta) / p.beta


def _weight_from_gap(p: TasepParams, end, low):
    # t^end / (s t)^low / 4^N written with nonnegative exponents only
    s, t = _rates(p)
    end = np.asarray(end, dtype=float)
    low = np.asarray(low, dtype=float)
    with np.errstate(invalid="ignore"):
        out = np.power(s, -low) * np.power(t, end - low)
    return out * 0.25**p.N


def two_lines_weight(p: TasepParams, s1, s2) -> float:
    """Unnormalized weight of a pair of walks of length ``N + 1`` (without the partition factor)."""
    s1 = np.asarray(s1, dtype=np.int64)
    s2 = np.asarray(s2, dtype=np.int64)
    if s1.shape != (p.N + 1,) or s2.shape != (p.N + 1,):
        raise ValueError(f"walks must have length {p.N + 1}")
    for s in (s1, s2):
        inc = np.diff(s)
        if s[0] != 0 or np.any((inc != 0) & (inc != 1)):
            raise ValueError("walks must start at 0 with increments in {0, 1}")
    xi = s1 - s2
    return float(_weight_from_gap(p, xi[-1], xi.min()))


def _walk_pairs(N: int):
    if N > MAX_N:
        raise TooLarge(f"two-lines enumeration limited to N <= {MAX_N}")
    inc = all_words(N, 2)
    eta = np.repeat(inc, len(inc), axis=0)
    gamma = np.tile(inc, (len(inc), 1))
    xi = np.concatenate([np.zeros((len(eta), 1), np.int64), np.cumsum(eta - gamma, axis=1)], axis=1)
    return xi


def two_lines_table(p: TasepParams) -> np.ndarray:
    """Unnormalized marginal weight of every particle word (index order)."""
    xi = _walk_pairs(p.N)
    w = _weight_from_gap(p, xi[:, -1], xi.min(axis=1))
    return w.reshape(2**p.N, 2**p.N).sum(axis=1)


def two_lines_partition(p: TasepParams) -> float:
    return float(two_lines_table(p).sum())


def two_lines_enumerate(p: TasepParams) -> ExactDistribution:
    t = two_lines_table(p)
    return ExactDistribution(p.N, 2, t / t.sum())


def bridge_normalizer(p: TasepParams) -> float:
    """``g^T P^N f`` of the closed-form case-1 bridge."""
    return math.exp(backward_table(tasep_case1_mixture(p).bridge).log_norm)


def predicted_partition(p: TasepParams) -> float:
    return bridge_normalizer(p) * (p.alpha + p.beta - 1) / (p.alpha * p.beta)


def reflected_P(size: int) -> np.ndarray:
    """Lazy walk on the nonnegative integers reflected at 0 (the law of ``|xi|``), cut at ``size``."""
    P = 0.5 * np.eye(size) + 0.25 * np.eye(size, k=1) + 0.25 * np.eye(size, k=-1)
    P[0, 1] = 0.5
    P[-1, -1] += 1.0 - P[-1].sum()
    return P


def lazy_step(b: int, b2: int) -> float:
    """Transition probability of the lazy walk on the integers."""
    return {0: 0.5, 1: 0.25, -1: 0.25}.get(b2 - b, 0.0)


def up_from_zero_count(path) -> int:
    z = np.asarray(path)
    return int(np.sum((z[:-1] == 0) & (z[1:] == 1)))


def reflected_path_weight(path) -> float:
    z = np.asarray(path, dtype=np.int64)
    P = reflected_P(int(z.max()) + 2)
    return float(np.prod(P[z[:-1], z[1:]]))


def lazy_path_weight(path) -> float:
    z = np.asarray(path, dtype=np.int64)
    return float(np.prod([lazy_step(a, b) for a, b in zip(z[:-1], z[1:])]))


def shift_summed_law(p: TasepParams, xi) -> float:
    """Closed form of the case-1 bridge summed over all admissible translates of ``xi``."""
    s, t = _rates(p)
    xi = np.asarray(xi, dtype=np.int64)
    r = s * t
    low = int(xi.min())
    return lazy_path_weight(xi) * t ** xi[-1] / (r**low * bridge_normalizer(p) * (1 - r))


def shift_summed_law_direct(p: TasepParams, xi) -> float:
    """Same quantity by summing bridge path probabilities over the truncated translates."""
    from ..bridge import path_probability

    mix = tasep_case1_mixture(p)
    br = mix.bridge
    xi = np.asarray(xi, dtype=np.int64)
    table = mix.table
    total = 0.0
    for b in range(-int(xi.min()), br.states - int(xi.max())):
        total += path_probability(br, b + xi, table)
    return total
