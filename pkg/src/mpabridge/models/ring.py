"""Two-species TASEP on a ring: letters 0 (hole), 1 (first class), 2 (second class).

The anchored measure puts a second-class particle on the last site and mixes
product laws over a hidden walk pinned at 0 at both ends. Averaging over
rotations gives a translation-invariant measure whose sectors of fixed
particle numbers are the invariant measures of the dynamics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..bridge import pinned
from ..errors import EmptySector, TooLarge
from ..mixture import MixtureSpec, decompose, kernel_from_matrices, sample_configurations
from ..mpa import MpaSpec, from_mixture
from ..oracle import ExactDistribution, GeneratorMatrix, all_words, enumerate_measure
from ..spectral import exact_doob_from_closed_form

PRIORITY = np.array([0, 2, 1])
MAX_N = 12
MAX_GENERATOR_N = 8


@dataclass(frozen=True)
class RingParams:
    N: int
    n1: int
    n2: int

    def __post_init__(self):
        if self.N < 2:
            raise ValueError("ring needs N >= 2")
        if self.n2 <= 0 or self.n1 < 0 or self.n1 + self.n2 > self.N:
            raise ValueError("need n2 > 0, n1 >= 0 and n1 + n2 <= N")


def ring_matrices(size: int) -> np.ndarray:
    eye = np.eye(size)
    M2 = np.zeros((size, size))
    M2[0, 0] = 1.0
    return np.stack([eye + np.eye(size, k=-1), eye + np.eye(size, k=1), M2])


def default_size(N: int) -> int:
    # a walk pinned at 0 at both ends of N positions never exceeds N // 2
    return N // 2 + 2


def ring_trace_spec(N: int, size: int | None = None) -> MpaSpec:
    return MpaSpec(ring_matrices(size or default_size(N)), N)


def ring_P(size: int) -> np.ndarray:
    """Row sums of the summed matrix are 4 away from the cut; the top row keeps its up-step as a self-loop."""
    M = ring_matrices(size).sum(axis=0)
    interior = np.ones(size, dtype=bool)
    interior[-1] = False
    return exact_doob_from_closed_form(M, 4.0, np.ones(size), interior=interior, lump_into=size - 1)


def ring_anchor_mixture(N: int, size: int | None = None) -> MixtureSpec:
    """Letters on sites ``0..N-2`` given a second-class particle on site ``N-1``."""
    if N < 2:
        raise ValueError("ring needs N >= 2")
    size = size or default_size(N)
    mats = ring_matrices(size)
    return MixtureSpec(pinned(ring_P(size), 0, 0, N), kernel_from_matrices(mats), 4.0)


def ring_anchored_spec(N: int, size: int | None = None) -> MpaSpec:
    """Open chain on sites ``0..N-2``: the trace with the anchor's ``M^2`` removed pins both ends at 0."""
    size = size or default_size(N)
    delta = np.zeros(size)
    delta[0] = 1.0
    return MpaSpec(ring_matrices(size), N - 1, x=delta, y=delta)


def ring_anchored_decompose(N: int, size: int | None = None) -> MixtureSpec:
    spec = ring_anchored_spec(N, size)
    B = spec.state_size
    interior = np.arange(B) < B - 1
    return decompose(spec, eigenpair=(4.0, np.ones(B)), interior=interior, lump_into=B - 1)


def ring_closed_form_residual(size: int = 200) -> float:
    """Residual of ``lambda = 4``, constant ``e`` on every row but the cut."""
    M = ring_matrices(size).sum(axis=0)
    e = np.ones(size)
    return float(np.abs(M @ e - 4 * e)[:-1].max() / (4 * e.sum()))


def _check_n(N: int) -> None:
    if N > MAX_N:
        raise TooLarge(f"ring enumeration limited to N <= {MAX_N}")


def _rotation_index(N: int, shift: int) -> np.ndarray:
    """``out[idx(w)] = idx(w')`` with ``w'_i = w_{(i + shift) mod N}``."""
    words = all_words(N, 3)
    rot = np.roll(words, -shift, axis=1)
    powers = 3 ** np.arange(N - 1, -1, -1, dtype=np.int64)
    return rot @ powers


def ring_constrained(N: int, j: int) -> ExactDistribution:
    """Measure with a second-class particle forced on site ``j`` (0-based)."""
    _check_n(N)
    if not 0 <= j < N:
        raise IndexError(f"site {j} outside 0..{N - 1}")
    anchor = enumerate_measure(from_mixture(ring_anchor_mixture(N)))
    last = np.zeros(3**N)
    last[np.arange(3 ** (N - 1)) * 3 + 2] = anchor.table
    # site j must land on the last position: w'_{N-1} = w_j
    return ExactDistribution(N, 3, last[_rotation_index(N, j + 1)])


def ring_mpa_constrained(p: RingParams, j: int) -> ExactDistribution:
    return ring_constrained(p.N, j)


def ring_grand(N: int) -> ExactDistribution:
    """Uniform average over the anchor site."""
    _check_n(N)
    acc = np.zeros(3**N)
    for j in range(N):
        acc += ring_constrained(N, j).table
    return ExactDistribution(N, 3, acc / N)


def sector_mask(N: int, n1: int, n2: int) -> np.ndarray:
    words = all_words(N, 3)
    return ((words == 1).sum(axis=1) == n1) & ((words == 2).sum(axis=1) == n2)


def _condition(d: ExactDistribution, p: RingParams) -> ExactDistribution:
    mask = sector_mask(p.N, p.n1, p.n2)
    if not np.any(mask & (d.table > 0)):
        raise EmptySector(f"no word with n1={p.n1}, n2={p.n2}")
    return d.condition(mask)


def ring_canonical(p: RingParams) -> ExactDistribution:
    return _condition(ring_grand(p.N), p)


def ring_trace_canonical(p: RingParams) -> ExactDistribution:
    """Oracle: truncated trace weights restricted to the sector."""
    _check_n(p.N)
    return _condition(enumerate_measure(ring_trace_spec(p.N)), p)


def ring_generator(N: int) -> GeneratorMatrix:
    if N > MAX_GENERATOR_N:
        raise TooLarge(f"ring generator limited to N <= {MAX_GENERATOR_N}")
    words = all_words(N, 3)
    idx = np.arange(3**N)
    powers = 3 ** np.arange(N - 1, -1, -1, dtype=np.int64)
    src, dst = [], []
    for i in range(N):
        k = (i + 1) % N
        a, b = words[:, i], words[:, k]
        move = PRIORITY[a] > PRIORITY[b]
        src.append(idx[move])
        dst.append(idx[move] + (b[move] - a[move]) * powers[i] + (a[move] - b[move]) * powers[k])
    src = np.concatenate(src)
    dst = np.concatenate(dst)
    return GeneratorMatrix.from_transitions(N, 3, src, dst, np.ones(len(src)))


def ring_sample_grand(N: int, n: int, rng: np.random.Generator, return_hidden: bool = False):
    """Draws from the rotation-averaged measure: anchor, bridge, letters, uniform rotation.

    With ``return_hidden`` also returns the hidden walks and the rotation applied
    (a word is ``np.roll(anchored, shift)``).
    """
    mix = ring_anchor_mixture(N)
    letters, paths = sample_configurations(mix, n, rng)
    anchored = np.concatenate([letters, np.full((n, 1), 2, dtype=letters.dtype)], axis=1)
    shifts = rng.integers(0, N, size=n)
    cols = (np.arange(N)[None, :] - shifts[:, None]) % N
    words = np.take_along_axis(anchored, cols, axis=1)
    if return_hidden:
        return words, paths, shifts
    return words


def ring_sample(p: RingParams, n: int, rng: np.random.Generator, max_rounds: int = 10_000) -> np.ndarray:
    """Sector draws by rejection from the rotation-averaged sampler."""
    out = []
    have = 0
    batch = max(64, 2 * n)
    for _ in range(max_rounds):
        w = ring_sample_grand(p.N, batch, rng)
        keep = w[((w == 1).sum(axis=1) == p.n1) & ((w == 2).sum(axis=1) == p.n2)]
        out.append(keep)
        have += len(keep)
        if have >= n:
            return np.concatenate(out)[:n]
    raise EmptySector(f"rejection sampler found only {have} of {n} words in the sector")
