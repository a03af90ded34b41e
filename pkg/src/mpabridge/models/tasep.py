"""Open boundary-driven TASEP: two matrix representations and the generator.

Hidden states ``0..B_max`` truncate the infinite index set. Letters are
occupation numbers (1 = particle). Injection rate ``alpha`` on the left,
removal rate ``beta`` on the right, hops to the right at rate 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..bridge import BridgeSpec
from ..errors import DegenerateParams, TailNotSummable, TooLarge, TruncationNotConverged
from ..mixture import MarginalKernel, MixtureSpec, decompose
from ..mpa import MpaSpec
from ..oracle import GeneratorMatrix, all_words
from ..spectral import eigen_residual

TRUNCATION_RTOL = 1e-10
TRUNCATION_STEP = 5
MAX_STATES = 4000


@dataclass(frozen=True)
class TasepParams:
    alpha: float
    beta: float
    N: int
    B_max: int | None = None

    def __post_init__(self):
        if not (0 < self.alpha <= 1 and 0 < self.beta <= 1):
            raise ValueError("rates must satisfy 0 < alpha, beta <= 1")
        if self.N < 1:
            raise ValueError("N must be positive")


def _ratio_powers(r: float, size: int) -> np.ndarray:
    b = np.arange(size)
    return np.where(b == 0, 1.0, r ** b.astype(float))


def case1_matrices(size: int) -> np.ndarray:
    """Bidiagonal letter matrices: ``M^0 = I + sub-diagonal``, ``M^1 = I + super-diagonal``."""
    eye = np.eye(size)
    return np.stack([eye + np.eye(size, k=-1), eye + np.eye(size, k=1)])


def _case1_spec(p: TasepParams, size: int) -> MpaSpec:
    y = _ratio_powers((1 - p.alpha) / p.alpha, size)
    x = _ratio_powers((1 - p.beta) / p.beta, size)
    return MpaSpec(case1_matrices(size), p.N, x=x, y=y)


def case1_truncation(p: TasepParams) -> int:
    """Number of hidden states, certified by ``Z_N`` changing by less than 1e-10 under 5 more states.

    The larger of the two compared truncations is returned.
    """
    if p.alpha + p.beta <= 1:
        raise TailNotSummable("the bidiagonal representation needs alpha + beta > 1")

    def stable(size):
        a = _case1_spec(p, size)._logZ
        b = _case1_spec(p, size + TRUNCATION_STEP)._logZ
        return abs(math.expm1(b - a)) < TRUNCATION_RTOL

    if p.B_max is not None:
        if p.B_max < p.N + 2:
            raise ValueError("B_max must be at least N + 2")
        if not stable(p.B_max + 1):
            raise TruncationNotConverged(f"Z_N not stable at B_max={p.B_max}")
        return p.B_max + 1 + TRUNCATION_STEP
    size = p.N + 3
    while not stable(size):
        size += TRUNCATION_STEP
        if size > MAX_STATES:
            raise TruncationNotConverged("Z_N did not stabilize within the state limit")
    return size + TRUNCATION_STEP


def tasep_case1_mpa(p: TasepParams) -> MpaSpec:
    return _case1_spec(p, case1_truncation(p))


def case1_eigenpair(size: int):
    """``lambda = 4``, ``e_b = b + 1``; exact on every row but the truncation edge."""
    interior = np.ones(size, dtype=bool)
    interior[-1] = False
    return 4.0, np.arange(1.0, size + 1), interior


def tasep_case1_decompose(p: TasepParams) -> MixtureSpec:
    spec = tasep_case1_mpa(p)
    lam, e, interior = case1_eigenpair(spec.state_size)
    return decompose(spec, eigenpair=(lam, e), interior=interior, lump_into=spec.state_size - 1)


def case1_P(size: int) -> np.ndarray:
    b = np.arange(size, dtype=float)
    P = 0.5 * np.eye(size)
    P += np.diag((b[:-1] + 2) / (4 * (b[:-1] + 1)), k=1)
    P += np.diag(b[1:] / (4 * (b[1:] + 1)), k=-1)
    P[-1, -1] += 1.0 - P[-1].sum()
    return P


def bernoulli_steps_kernel(size: int, up, down, flat) -> MarginalKernel:
    """Two-letter kernel on nearest-neighbour hidden steps; other steps unreachable."""
    probs = np.full((size, size, 2), 0.5)
    reach = np.zeros((size, size), dtype=bool)
    for b in range(size):
        for b2, q in ((b + 1, up), (b - 1, down), (b, flat)):
            if 0 <= b2 < size:
                probs[b, b2] = (1 - q, q)
                reach[b, b2] = True
    return MarginalKernel(probs, reach)


def tasep_case1_mixture(p: TasepParams) -> MixtureSpec:
    """Closed-form bridge mixture: lazy walk reweighted by ``b + 1``, fair coins on flat steps."""
    size = case1_truncation(p)
    b = np.arange(size, dtype=float)
    f = _ratio_powers((1 - p.beta) / p.beta, size) / (b + 1)
    g = _ratio_powers((1 - p.alpha) / p.alpha, size) * (b + 1)
    bridge = BridgeSpec(case1_P(size), f, g, p.N + 1)
    return MixtureSpec(bridge, bernoulli_steps_kernel(size, 1.0, 0.0, 0.5), 4.0)


def _general_size(p: TasepParams) -> int:
    if not 0 < p.beta < 1:
        raise DegenerateParams("the general representation needs 0 < beta < 1")
    if p.B_max is None:
        return p.N + 2
    if p.B_max < p.N + 1:
        raise ValueError("B_max must be at least N + 1")
    return p.B_max + 1


def general_matrices(beta: float, size: int) -> np.ndarray:
    M0 = np.eye(size, k=-1)
    M1 = np.triu(np.ones((size, size)))
    M1[0, :] = 1.0 / beta
    return np.stack([M0, M1])


def tasep_general_mpa(p: TasepParams) -> MpaSpec:
    """Exact finite spec: paths pinned to end at 0 with unit down-steps never pass ``N``."""
    size = _general_size(p)
    y = (1.0 / p.alpha) ** np.arange(size, dtype=float)
    x = np.zeros(size)
    x[0] = 1.0
    return MpaSpec(general_matrices(p.beta, size), p.N, x=x, y=y)


def general_eigenpair(beta: float, size: int):
    return 1.0 / (beta * (1 - beta)), beta ** np.arange(size, dtype=float)


def general_P(beta: float, size: int) -> np.ndarray:
    """Geometric up-jumps, unit down-jumps; mass beyond the cut lumped onto the top state."""
    P = np.zeros((size, size))
    k = np.arange(size)
    P[0] = (1 - beta) * beta**k
    for b in range(1, size):
        P[b, b - 1:] = (1 - beta) * beta ** (k[b - 1:] - b + 1)
    P[:, -1] += 1.0 - P.sum(axis=1)
    return P


def tasep_general_decompose(p: TasepParams) -> MixtureSpec:
    spec = tasep_general_mpa(p)
    lam, e = general_eigenpair(p.beta, spec.state_size)
    top = spec.state_size - 1
    return decompose(spec, eigenpair=(lam, e), interior=np.zeros(spec.state_size, bool), lump_into=top)


def tasep_general_mixture(p: TasepParams) -> MixtureSpec:
    size = _general_size(p)
    f = np.zeros(size)
    f[0] = 1.0
    g = (p.beta / p.alpha) ** np.arange(size, dtype=float)
    probs = np.full((size, size, 2), 0.5)
    reach = np.zeros((size, size), dtype=bool)
    for b in range(size):
        for b2 in range(max(b - 1, 0), size):
            probs[b, b2] = (1.0, 0.0) if b2 == b - 1 else (0.0, 1.0)
            reach[b, b2] = True
    bridge = BridgeSpec(general_P(p.beta, size), f, g, p.N + 1)
    return MixtureSpec(bridge, MarginalKernel(probs, reach), 1.0 / (p.beta * (1 - p.beta)))


def closed_form_residuals(alpha: float, beta: float, size: int = 200) -> dict[str, float]:
    """Eigen-equation residuals of both closed-form pairs on large truncations.

    The bidiagonal pair is checked on every row but the edge; the general pair
    on all rows, where the cut contributes only ``beta**size``.
    """
    lam, e, interior = case1_eigenpair(size)
    M = case1_matrices(size).sum(axis=0)
    r1 = np.abs((M @ e - lam * e)[interior]).max() / (lam * e.sum())
    lam2, e2 = general_eigenpair(beta, size)
    r2 = eigen_residual(general_matrices(beta, size).sum(axis=0), lam2, e2)
    return {"case1": float(r1), "general": float(r2)}


def tasep_generator(N: int, alpha: float, beta: float) -> GeneratorMatrix:
    if N > 20:
        raise TooLarge("TASEP generator limited to N <= 20 (2^N states)")
    words = all_words(N, 2)
    idx = np.arange(2**N)
    src, dst, rate = [], [], []
    for i in range(N - 1):
        hop = (words[:, i] == 1) & (words[:, i + 1] == 0)
        src.append(idx[hop])
        dst.append(idx[hop] - 2 ** (N - 1 - i) + 2 ** (N - 2 - i))
        rate.append(np.ones(hop.sum()))
    inject = words[:, 0] == 0
    src.append(idx[inject])
    dst.append(idx[inject] + 2 ** (N - 1))
    rate.append(np.full(inject.sum(), alpha))
    remove = words[:, -1] == 1
    src.append(idx[remove])
    dst.append(idx[remove] - 1)
    rate.append(np.full(remove.sum(), beta))
    return GeneratorMatrix.from_transitions(N, 2, np.concatenate(src), np.concatenate(dst), np.concatenate(rate))
