"""Queue construction of the two-species ring measures.

Clients arrive on sites in ``arrivals`` and services are offered on sites in
``services``; time runs from right to left around the ring. A client is served
at the nearest unused service to its left. Used services carry first-class
particles, unused ones second-class particles, every other site is empty.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from ..errors import InvalidCounts
from ..oracle import ExactDistribution, all_words
from .ring import RingParams


@dataclass(frozen=True)
class QueueInstance:
    N: int
    arrivals: frozenset
    services: frozenset

    def __post_init__(self):
        object.__setattr__(self, "arrivals", frozenset(int(a) for a in self.arrivals))
        object.__setattr__(self, "services", frozenset(int(s) for s in self.services))
        if any(not 0 <= i < self.N for i in self.arrivals | self.services):
            raise InvalidCounts("sites must lie in 0..N-1")
        if len(self.arrivals) >= len(self.services):
            raise InvalidCounts("need fewer arrivals than services")

    @property
    def A(self) -> np.ndarray:
        out = np.zeros(self.N, dtype=np.int64)
        out[list(self.arrivals)] = 1
        return out

    @property
    def S(self) -> np.ndarray:
        out = np.zeros(self.N, dtype=np.int64)
        out[list(self.services)] = 1
        return out


def served_services(inst: QueueInstance, order=None) -> frozenset:
    """Greedy matching: each client in ``order`` takes the nearest free service at or left of it."""
    free = set(inst.services)
    used = set()
    for i in (sorted(inst.arrivals) if order is None else order):
        for d in range(inst.N):
            j = (i - d) % inst.N
            if j in free:
                free.remove(j)
                used.add(j)
                break
    return frozenset(used)


def queue_word(inst: QueueInstance, order=None) -> np.ndarray:
    used = served_services(inst, order)
    w = np.zeros(inst.N, dtype=np.int64)
    for j in inst.services:
        w[j] = 1 if j in used else 2
    return w


def gap_walk(A, S, reference: int) -> dict[float, int]:
    """Walk on dual points ``k + 1/2`` over three periods, zero at ``reference + 1/2``.

    Moving one dual point to the left adds ``A - S`` of the site crossed.
    """
    A = np.asarray(A)
    S = np.asarray(S)
    N = len(A)
    out = {reference + 0.5: 0}
    v = 0
    for k in range(reference, reference - 2 * N, -1):
        v += A[k % N] - S[k % N]
        out[k - 0.5] = v
    v = 0
    for k in range(reference + 1, reference + 2 * N + 1):
        v -= A[k % N] - S[k % N]
        out[k + 0.5] = v
    return out


def record_sites(A, S) -> np.ndarray:
    """Sites whose dual edge is a record: the walk value on its left is below every value to the right."""
    N = len(A)
    walk = gap_walk(A, S, N - 1)
    rec = np.zeros(N, dtype=bool)
    for site in range(N):
        left = walk[site - 0.5]
        rec[site] = all(left < walk[site - 0.5 + m] for m in range(1, 2 * N))
    return rec


def lindley_queue(A, S, anchor: int | None = None) -> np.ndarray:
    """Queue lengths on dual points, scanning right to left around the ring.

    The scan starts with an empty queue just right of ``anchor`` (default:
    the last site). ``out[i]`` is the queue left of site ``i``, after site
    ``i`` has been processed.
    """
    A = np.asarray(A)
    S = np.asarray(S)
    N = len(A)
    anchor = N - 1 if anchor is None else anchor
    q = np.zeros(N, dtype=np.int64)
    cur = 0
    for step in range(N):
        i = (anchor - step) % N
        cur = max(0, cur + A[i] - S[i])
        q[i] = cur
    return q


def letters_from_queue(A, S, zeta) -> np.ndarray:
    """Letters from queue lengths; site ``i`` sees the queue ``zeta[i+1]`` waiting on its right.

    A service with a nonempty queue is used. With an empty queue it is used
    only by a client arriving at the same site; otherwise it stays unused.
    """
    A = np.asarray(A)
    S = np.asarray(S)
    z = np.asarray(zeta)
    right = z[(np.arange(len(A)) + 1) % len(A)]
    return np.where(right > 0, S, 2 * S - S * A)


def anchored_word(inst: QueueInstance) -> tuple[np.ndarray, np.ndarray]:
    """Word and queue profile for an instance whose last site is a record."""
    A, S = inst.A, inst.S
    if not record_sites(A, S)[-1]:
        raise InvalidCounts("the last site is not a record")
    zeta = lindley_queue(A, S)
    return letters_from_queue(A, S, zeta), zeta


def _check_counts(p: RingParams) -> None:
    if p.n1 < 0 or p.n2 <= 0 or p.n1 + p.n2 > p.N:
        raise InvalidCounts("need n1 >= 0, n2 > 0, n1 + n2 <= N")


def queue_enumerate(p: RingParams, anchored: bool = False) -> ExactDistribution:
    """Exact law of the queue word over uniform arrival and service sets of the given sizes.

    With ``anchored`` only instances whose last site is a record count.
    """
    _check_counts(p)
    N = p.N
    powers = 3 ** np.arange(N - 1, -1, -1, dtype=np.int64)
    table = np.zeros(3**N)
    for arr in combinations(range(N), p.n1):
        for srv in combinations(range(N), p.n1 + p.n2):
            inst = QueueInstance(N, frozenset(arr), frozenset(srv))
            if anchored and not record_sites(inst.A, inst.S)[-1]:
                continue
            table[queue_word(inst) @ powers] += 1.0
    return ExactDistribution(N, 3, table / table.sum())


def iid_anchored_enumerate(N: int) -> ExactDistribution:
    """Fair independent arrival and service bits on sites ``0..N-2``, conditioned on an empty queue at the left end.

    The word reads the queue through the letter rule, with a second-class
    particle fixed on the last site.
    """
    bits = all_words(2 * (N - 1), 2)
    A = np.concatenate([bits[:, : N - 1], np.zeros((len(bits), 1), np.int64)], axis=1)
    S = np.concatenate([bits[:, N - 1:], np.ones((len(bits), 1), np.int64)], axis=1)
    powers = 3 ** np.arange(N - 1, -1, -1, dtype=np.int64)
    table = np.zeros(3**N)
    for a, s in zip(A, S):
        zeta = lindley_queue(a, s)
        if zeta[0] != 0:
            continue
        table[letters_from_queue(a, s, zeta) @ powers] += 1.0
    return ExactDistribution(N, 3, table / table.sum())


def queue_words_batch(A: np.ndarray, S: np.ndarray) -> np.ndarray:
    """Vectorized queue words for arrays of shape ``(n, N)``.

    Scanning two periods right to left from an empty queue gives the exact
    queue on the first period: the cumulative gap over one full period is
    strictly negative, so the supremum defining it is attained within ``N`` sites.
    """
    n, N = A.shape
    A2 = np.concatenate([A, A], axis=1)
    S2 = np.concatenate([S, S], axis=1)
    q = np.zeros(n, dtype=np.int64)
    used = np.zeros((n, 2 * N), dtype=bool)
    for t in range(2 * N - 1, -1, -1):
        used[:, t] = (S2[:, t] == 1) & ((q > 0) | (A2[:, t] == 1))
        q = np.maximum(0, q + A2[:, t] - S2[:, t])
    return np.where(S == 1, np.where(used[:, :N], 1, 2), 0)


def _random_subsets(rng: np.random.Generator, n: int, N: int, k: int) -> np.ndarray:
    keys = rng.random((n, N))
    pick = np.argsort(keys, axis=1)[:, :k]
    out = np.zeros((n, N), dtype=np.int64)
    np.put_along_axis(out, pick, 1, axis=1)
    return out


def queue_sample(p: RingParams, n: int, rng: np.random.Generator) -> np.ndarray:
    _check_counts(p)
    A = _random_subsets(rng, n, p.N, p.n1)
    S = _random_subsets(rng, n, p.N, p.n1 + p.n2)
    return queue_words_batch(A, S)
