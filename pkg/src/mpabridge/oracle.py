"""Brute-force oracles: full probability tables, distances, generator checks.

Words of length ``N`` over ``0..|A|-1`` are indexed in mixed radix with the
first letter most significant, so index order is lexicographic order and the
CSV dump lists words in that order, one digit per letter (dot-separated
integers for alphabets above 36).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import ShapeMismatch, TooLarge
from .mixture import MixtureSpec
from .mpa import MpaSpec, log_probabilities
from .spectral import is_irreducible

MAX_TABLE = 10**7
_DIGITS = "0123456789abcdefghijklmnopqrstuvwxyz"


def all_words(N: int, A: int) -> np.ndarray:
    """Every word in index order, shape ``(A**N, N)``."""
    idx = np.arange(A**N, dtype=np.int64)
    powers = A ** np.arange(N - 1, -1, -1, dtype=np.int64)
    return (idx[:, None] // powers[None, :]) % A


def word_index(word, A: int) -> int:
    i = 0
    for a in word:
        i = i * A + int(a)
    return i


def word_string(word, A: int | None = None) -> str:
    """Radix-36 digits, or dot-separated integers when the alphabet is larger than 36."""
    word = [int(a) for a in word]
    if (A if A is not None else max(word, default=0) + 1) <= len(_DIGITS):
        return "".join(_DIGITS[a] for a in word)
    return ".".join(str(a) for a in word)


@dataclass(frozen=True, eq=False)
class ExactDistribution:
    N: int
    alphabet_size: int
    table: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.table, dtype=float)
        if t.shape != (self.alphabet_size**self.N,):
            raise ShapeMismatch(f"table of shape {t.shape} does not fit {self.alphabet_size}^{self.N}")
        t = t.copy()
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    def words(self) -> np.ndarray:
        return all_words(self.N, self.alphabet_size)

    def prob(self, word) -> float:
        return float(self.table[word_index(word, self.alphabet_size)])

    def condition(self, mask) -> "ExactDistribution":
        mask = np.asarray(mask, dtype=bool)
        t = np.where(mask, self.table, 0.0)
        s = t.sum()
        if s <= 0:
            raise ValueError("conditioning event has probability zero")
        return ExactDistribution(self.N, self.alphabet_size, t / s)

    def site_marginal(self, i: int) -> np.ndarray:
        letters = self.words()[:, i]
        return np.bincount(letters, weights=self.table, minlength=self.alphabet_size)

    def moment(self, i: int, j: int) -> float:
        w = self.words().astype(float)
        return float((w[:, i] * w[:, j] * self.table).sum())

    def to_csv(self, fh) -> None:
        fh.write("word,probability\n")
        for word, p in zip(self.words(), self.table):
            fh.write(f"{word_string(word, self.alphabet_size)},{p:.17g}\n")


def _workers(requested: int | None) -> int:
    if requested is not None:
        return max(1, requested)
    cap = os.environ.get("MPA_BRIDGE_THREADS")
    return max(1, int(cap)) if cap else 1


def enumerate_measure(spec: MpaSpec, max_size: int = MAX_TABLE, workers: int | None = None) -> ExactDistribution:
    """Probability of every word, evaluated one word at a time from the letter matrices."""
    A, N = spec.alphabet_size, spec.N
    if A**N > max_size:
        raise TooLarge(f"{A}^{N} words exceed the enumeration limit {max_size}")
    words = all_words(N, A)
    if spec.is_trace:
        return ExactDistribution(N, A, _trace_table(spec, words))
    nw = _workers(workers)
    chunks = np.array_split(np.arange(len(words)), max(1, min(nw * 4, len(words) // 4096 + 1)))
    if nw == 1:
        parts = [log_probabilities(spec, words[c]) for c in chunks]
    else:
        with ThreadPoolExecutor(nw) as ex:
            parts = list(ex.map(lambda c: log_probabilities(spec, words[c]), chunks))
    return ExactDistribution(N, A, np.exp(np.concatenate(parts)))


def _trace_table(spec: MpaSpec, words: np.ndarray) -> np.ndarray:
    A, N, B = spec.alphabet_size, spec.N, spec.state_size
    prods = spec.matrices.copy()
    logs = np.zeros(A)
    for _ in range(N - 1):
        prods = (prods[:, None, :, :] @ spec.matrices[None, :, :, :]).reshape(-1, B, B)
        logs = np.repeat(logs, A)
        m = prods.max(axis=(1, 2))
        pos = m > 0
        prods[pos] /= m[pos, None, None]
        logs[pos] += np.log(m[pos])
    tr = np.trace(prods, axis1=1, axis2=2)
    with np.errstate(divide="ignore"):
        lw = np.where(tr > 0, logs + np.log(np.where(tr > 0, tr, 1.0)), -np.inf)
    return np.exp(lw - spec._logZ)


def enumerate_mixture(mix: MixtureSpec, max_size: int = MAX_TABLE) -> ExactDistribution:
    """Literal double sum over hidden paths and letters, independent of any transfer matrix.

    Each hidden path gets its unnormalized bridge weight, the letters given the
    path form an explicit product table, and the mixture is their weighted sum
    normalized by the total path weight.
    """
    br, probs = mix.bridge, mix.kernel.probs
    B, L, A, N = br.states, br.length, mix.alphabet_size, mix.N
    if B**L > max_size or A**N > max_size:
        raise TooLarge(f"{B}^{L} hidden paths or {A}^{N} words exceed the limit {max_size}")
    out = np.zeros(A**N)
    total = 0.0
    paths_all = all_words(L, B)
    step = max(1, 2_000_000 // max(1, A**N))
    for s in range(0, len(paths_all), step):
        z = paths_all[s:s + step]
        rho = br.g[z[:, 0]] * br.f[z[:, -1]]
        for i in range(N):
            rho = rho * br.P[z[:, i], z[:, i + 1]]
        total += rho.sum()
        keep = rho > 0
        z, rho = z[keep], rho[keep]
        if not len(z):
            continue
        prod = np.ones((len(z), 1))
        for i in range(N):
            site = probs[z[:, i], z[:, i + 1]]
            prod = (prod[:, :, None] * site[:, None, :]).reshape(len(z), -1)
        out += rho @ prod
    return ExactDistribution(N, A, out / total)


def _check_pair(d1: ExactDistribution, d2: ExactDistribution) -> None:
    if d1.N != d2.N or d1.alphabet_size != d2.alphabet_size:
        raise ShapeMismatch(
            f"distributions over {d1.alphabet_size}^{d1.N} and {d2.alphabet_size}^{d2.N} differ in shape")


def total_variation(d1: ExactDistribution, d2: ExactDistribution) -> float:
    _check_pair(d1, d2)
    return 0.5 * float(np.abs(d1.table - d2.table).sum())


def max_abs_diff(d1: ExactDistribution, d2: ExactDistribution) -> float:
    _check_pair(d1, d2)
    return float(np.abs(d1.table - d2.table).max())


def empirical(words, N: int, A: int) -> ExactDistribution:
    """Frequency table of sampled words."""
    words = np.asarray(words, dtype=np.int64)
    powers = A ** np.arange(N - 1, -1, -1, dtype=np.int64)
    counts = np.bincount(words @ powers, minlength=A**N)
    return ExactDistribution(N, A, counts / counts.sum())


@dataclass(frozen=True, eq=False)
class GeneratorMatrix:
    """Continuous-time generator over words (sparse CSR), rows summing to zero."""

    rates: sp.csr_matrix
    N: int
    alphabet_size: int

    def __post_init__(self):
        L = sp.csr_matrix(self.rates, dtype=float)
        n = self.alphabet_size**self.N
        if L.shape != (n, n):
            raise ShapeMismatch(f"generator shape {L.shape} does not fit {n} states")
        off = L - sp.diags(L.diagonal())
        if off.nnz and off.data.min() < 0:
            raise ValueError("off-diagonal rates must be nonnegative")
        scale = max(1.0, float(np.abs(L.diagonal()).max()) if n else 1.0)
        dev = np.abs(np.asarray(L.sum(axis=1)).ravel()).max()
        if dev > 1e-12 * scale:
            raise ValueError(f"generator rows must sum to 0 (max deviation {dev:.3e})")
        object.__setattr__(self, "rates", L)

    @classmethod
    def from_transitions(cls, N: int, A: int, src, dst, rate) -> "GeneratorMatrix":
        n = A**N
        src = np.asarray(src, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        rate = np.asarray(rate, dtype=float)
        off = sp.coo_matrix((rate, (src, dst)), shape=(n, n)).tocsr()
        out = np.asarray(off.sum(axis=1)).ravel()
        return cls(off - sp.diags(out), N, A)

    def rate(self, i: int, j: int) -> float:
        return float(self.rates[i, j])


def stationarity_residual(d: ExactDistribution, L: GeneratorMatrix) -> float:
    """``max |(mu^T L)_s|`` over states ``s``."""
    if d.N != L.N or d.alphabet_size != L.alphabet_size:
        raise ShapeMismatch("distribution and generator live on different state spaces")
    return float(np.abs(L.rates.T @ d.table).max())


def solve_stationary(L: GeneratorMatrix, support=None) -> np.ndarray:
    """Invariant law of ``L`` restricted to ``support`` (dense solve; small systems only)."""
    n = L.rates.shape[0]
    idx = np.arange(n) if support is None else np.flatnonzero(support)
    sub = L.rates[idx][:, idx].toarray()
    lhs = np.vstack([sub.T, np.ones(len(idx))])
    rhs = np.zeros(len(idx) + 1)
    rhs[-1] = 1.0
    sol, *_ = np.linalg.lstsq(lhs, rhs, rcond=None)
    out = np.zeros(n)
    out[idx] = sol
    return out


def random_spec(rng: np.random.Generator, A: int, B: int, N: int, zero_frac: float = 0.25) -> MpaSpec:
    """Random open-chain spec with some structural zeros and an irreducible ``M``."""
    while True:
        mats = rng.random((A, B, B)) * (rng.random((A, B, B)) >= zero_frac)
        if not is_irreducible(mats.sum(axis=0)):
            continue
        x = rng.random(B) * (rng.random(B) >= zero_frac)
        y = rng.random(B) * (rng.random(B) >= zero_frac)
        if x.any() and y.any():
            try:
                return MpaSpec(mats, N, x=x, y=y)
            except ValueError:
                continue


def random_mixture(rng: np.random.Generator, A: int, B: int, N: int, zero_frac: float = 0.25) -> MixtureSpec:
    from .mixture import decompose

    return decompose(random_spec(rng, A, B, N, zero_frac))

