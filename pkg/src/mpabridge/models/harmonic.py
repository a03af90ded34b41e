"""Boundary-driven harmonic model: ordered uniform densities mixed with geometric occupations.

Hidden values ``m_L = zeta_0 <= zeta_1 <= ... <= zeta_N <= zeta_{N+1} = m_R``
are uniform order statistics; site ``i`` then holds a geometric number of
particles with mean ``zeta_i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from ..errors import TooLarge
from ..oracle import ExactDistribution

TAIL_MASS = 1e-12


@dataclass(frozen=True)
class HarmonicParams:
    m_L: float
    m_R: float
    N: int
    lambda_rate: float = 1.0

    def __post_init__(self):
        if not 0 < self.m_L < self.m_R:
            raise ValueError("need 0 < m_L < m_R")
        if self.N < 0:
            raise ValueError("N must be nonnegative")
        if self.lambda_rate <= 0:
            raise ValueError("lambda_rate must be positive")

    @classmethod
    def from_rates(cls, alpha: float, beta: float, N: int, lambda_rate: float = 1.0) -> "HarmonicParams":
        """Reservoir parameters ``0 < alpha < beta < 1`` mapped to the mean range."""
        return cls(alpha / (1 - alpha), beta / (1 - beta), N, lambda_rate)


def geometric_pmf(k, m):
    """``G_m(k) = (1/(1+m)) (m/(1+m))^k``, mean ``m``."""
    m = np.asarray(m, dtype=float)
    return np.power(m / (1 + m), k) / (1 + m)


def harmonic_bridge_sample(p: HarmonicParams, n: int, rng: np.random.Generator,
                           method: str = "order") -> np.ndarray:
    """Hidden values ``(n, N + 2)`` with pinned ends.

    ``method="order"`` sorts ``N`` uniforms; ``method="exponential"`` draws
    ``N + 1`` exponential increments of rate ``lambda_rate`` and rescales them
    to the interval length, which conditions the walk on its endpoint.
    """
    width = p.m_R - p.m_L
    if method == "order":
        inner = np.sort(rng.uniform(p.m_L, p.m_R, size=(n, p.N)), axis=1)
    elif method == "exponential":
        gaps = rng.exponential(1.0 / p.lambda_rate, size=(n, p.N + 1))
        cum = np.cumsum(gaps, axis=1)
        inner = p.m_L + width * cum[:, :-1] / cum[:, -1:]
    else:
        raise ValueError(f"unknown method {method!r}")
    return np.concatenate([np.full((n, 1), p.m_L), inner, np.full((n, 1), p.m_R)], axis=1)


def harmonic_sample(p: HarmonicParams, n: int, rng: np.random.Generator, return_hidden: bool = False):
    """Words of shape ``(n, N)``; optionally also the hidden values used."""
    z = harmonic_bridge_sample(p, n, rng)
    means = z[:, 1:-1]
    words = rng.geometric(1.0 / (1.0 + means)) - 1
    if return_hidden:
        return words, z
    return words


def one_site_empty_probability(p: HarmonicParams) -> float:
    """Closed form of ``P(eta = 0)`` for a single site."""
    return math.log((1 + p.m_R) / (1 + p.m_L)) / (p.m_R - p.m_L)


def simplex_volume(p: HarmonicParams) -> float:
    return (p.m_R - p.m_L) ** p.N / math.factorial(p.N)


def harmonic_exact_small(p: HarmonicParams, word, epsabs: float = 1e-13, epsrel: float = 1e-12) -> float:
    """Adaptive quadrature of the mixture over the ordered simplex (``N <= 3``)."""
    word = [int(k) for k in word]
    if len(word) != p.N:
        raise ValueError(f"word must have length {p.N}")
    if p.N > 3:
        raise TooLarge("adaptive quadrature limited to N <= 3")
    if p.N == 0:
        return 1.0

    def integrand(*m):
        return float(np.prod([geometric_pmf(k, mi) for k, mi in zip(word, m)]))

    # innermost variable first; each upper limit is the next coordinate
    ranges = []
    for i in range(p.N - 1):
        ranges.append(lambda *outer: (p.m_L, outer[0]))
    ranges.append((p.m_L, p.m_R))
    val, _ = integrate.nquad(integrand, ranges, opts={"epsabs": epsabs, "epsrel": epsrel, "limit": 200})
    return val / simplex_volume(p)


def tail_cutoff(p: HarmonicParams, tail: float = TAIL_MASS) -> int:
    """Smallest ``K`` with ``P(eta_i >= K) < tail`` for every site."""
    ratio = p.m_R / (1 + p.m_R)
    return int(math.ceil(math.log(tail) / math.log(ratio)))


def harmonic_table(p: HarmonicParams, K: int | None = None, nodes: int = 200) -> ExactDistribution:
    """Law of the word truncated to letters ``0..K-1`` (``N <= 2``) by Gauss-Legendre on the simplex.

    The table keeps the truncation deficit; it sums to at least ``1 - N * tail``.
    """
    if p.N > 2:
        raise TooLarge("tensor quadrature table limited to N <= 2")
    K = tail_cutoff(p) if K is None else K
    x, w = np.polynomial.legendre.leggauss(nodes)
    ks = np.arange(K)
    half = 0.5 * (p.m_R - p.m_L)
    m = p.m_L + half * (x + 1)
    wm = half * w
    if p.N == 0:
        return ExactDistribution(0, K, np.ones(1))
    if p.N == 1:
        tab = geometric_pmf(ks[:, None], m[None, :]) @ wm
        return ExactDistribution(1, K, tab / simplex_volume(p))
    # inner integral over m1 in [m_L, m2] for every outer node m2
    inner_half = 0.5 * (m - p.m_L)
    m1 = p.m_L + inner_half[:, None] * (x[None, :] + 1)
    w1 = inner_half[:, None] * w[None, :]
    G1 = geometric_pmf(ks[:, None, None], m1[None, :, :])
    I1 = (G1 * w1[None]).sum(axis=2)
    G2 = geometric_pmf(ks[:, None], m[None, :])
    tab = (I1 * wm[None, :]) @ G2.T
    return ExactDistribution(2, K, tab.ravel() / simplex_volume(p))


def mean_profile(p: HarmonicParams) -> np.ndarray:
    """``E[eta_i] = E[zeta_i]``, linear from ``m_L`` to ``m_R``."""
    i = np.arange(1, p.N + 1)
    return p.m_L + i * (p.m_R - p.m_L) / (p.N + 1)


def first_hidden_cdf(p: HarmonicParams, m):
    """CDF of the smallest of ``N`` uniforms on the interval."""
    u = np.clip((np.asarray(m, dtype=float) - p.m_L) / (p.m_R - p.m_L), 0.0, 1.0)
    return 1.0 - (1.0 - u) ** p.N
