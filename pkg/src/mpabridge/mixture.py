"""Mixtures of inhomogeneous product measures driven by a Markov bridge.

The canonical form of an open-chain MPA measure: a hidden path ``z`` of
length ``N + 1`` is drawn from a bridge with stochastic matrix ``P`` and end
weights ``f``, ``g``; then each letter ``w_i`` is drawn independently from
``p[z_i, z_{i+1}]``. :func:`decompose` produces this form from letter
matrices, :func:`mpabridge.mpa.from_mixture` goes back.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from . import _backend
from .bridge import (BackwardTable, BridgeSpec, backward_table, joint_marginal, path_probability,
                     sample_paths)
from .errors import IndexOutOfRange, LengthMismatch
from .mpa import MpaSpec
from .spectral import (DEFAULT_MAX_ITER, DEFAULT_TOL, doob_transform, exact_doob_from_closed_form,
                       perron, stationary_distribution)

KERNEL_TOL = 1e-12


def _frozen(a, dtype=float) -> np.ndarray:
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class MarginalKernel:
    """``probs[b, b', a]``: law of a letter emitted on the hidden step ``b -> b'``.

    Pairs outside ``reachable`` carry a uniform placeholder that must never be
    used with positive probability.
    """

    probs: np.ndarray
    reachable: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        reach = np.asarray(self.reachable, dtype=bool)
        if probs.ndim != 3 or probs.shape[0] != probs.shape[1] or reach.shape != probs.shape[:2]:
            raise ValueError("kernel must have shape (|B|, |B|, |A|) with a (|B|, |B|) mask")
        if np.any(probs < 0) or np.any(probs > 1):
            raise ValueError("kernel entries must lie in [0, 1]")
        dev = np.abs(probs.sum(axis=2) - 1.0)
        if np.any(dev > KERNEL_TOL):
            raise ValueError(f"kernel rows must sum to 1 (max deviation {dev.max():.3e})")
        object.__setattr__(self, "probs", _frozen(probs))
        object.__setattr__(self, "reachable", _frozen(reach, bool))

    @property
    def alphabet_size(self) -> int:
        return self.probs.shape[2]

    def mean_grid(self, values=None) -> np.ndarray:
        """``V[b, b'] = sum_a p[b, b', a] * value(a)``; values default to the letter codes."""
        vals = np.arange(self.alphabet_size, dtype=float) if values is None else np.asarray(values, float)
        return self.probs @ vals


def kernel_from_matrices(mats) -> MarginalKernel:
    """``p[b, b', a] = M^a[b, b'] / M[b, b']`` wherever ``M > 0``."""
    mats = np.asarray(mats, dtype=float)
    A = mats.shape[0]
    M = mats.sum(axis=0)
    reach = M > 0
    probs = np.full(M.shape + (A,), 1.0 / A)
    ratio = np.moveaxis(mats, 0, 2)[reach] / M[reach][:, None]
    probs[reach] = ratio / ratio.sum(axis=1, keepdims=True)
    return MarginalKernel(probs, reach)


@dataclass(frozen=True, eq=False)
class MixtureSpec:
    bridge: BridgeSpec
    kernel: MarginalKernel
    lam: float = 1.0

    def __post_init__(self):
        if self.kernel.probs.shape[0] != self.bridge.states:
            raise ValueError("kernel and bridge disagree on the number of hidden states")
        if self.lam <= 0:
            raise ValueError("lambda must be positive")
        if np.any((self.bridge.P > 0) & ~self.kernel.reachable):
            raise ValueError("bridge can use a hidden step whose kernel is undefined")

    @property
    def N(self) -> int:
        return self.bridge.N

    @property
    def alphabet_size(self) -> int:
        return self.kernel.alphabet_size

    @cached_property
    def table(self) -> BackwardTable:
        return backward_table(self.bridge)


def decompose(spec: MpaSpec, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
              eigenpair: tuple[float, np.ndarray] | None = None, interior=None,
              lump_into: int | None = None) -> MixtureSpec:
    """Canonical bridge mixture of an open-chain MPA spec.

    By default the Perron pair of ``M`` comes from power iteration. Models on
    truncated infinite matrices pass their closed-form ``eigenpair`` together
    with the ``interior``/``lump_into`` arguments of
    :func:`mpabridge.spectral.exact_doob_from_closed_form`.
    """
    if spec.is_trace:
        raise ValueError("decompose needs boundary vectors; ring measures are handled per model")
    M = spec.M
    if eigenpair is None:
        pair = perron(M, tol=tol, max_iter=max_iter)
        P = doob_transform(M, pair)
        lam, e = pair.lam, np.asarray(pair.evec)
    else:
        lam, e = float(eigenpair[0]), np.asarray(eigenpair[1], dtype=float)
        P = exact_doob_from_closed_form(M, lam, e, interior=interior, lump_into=lump_into)
    kernel = kernel_from_matrices(spec.matrices)
    bridge = BridgeSpec(P, spec.x / e, spec.y * e, spec.N + 1)
    return MixtureSpec(bridge, kernel, lam)


def _check_word(mix: MixtureSpec, word) -> np.ndarray:
    w = np.asarray(word, dtype=np.int64)
    if w.shape != (mix.N,):
        raise LengthMismatch(f"expected a word of length {mix.N}, got shape {w.shape}")
    if np.any(w < 0) or np.any(w >= mix.alphabet_size):
        raise ValueError("letter outside the alphabet")
    return w


def mixture_probability(mix: MixtureSpec, word) -> float:
    """Probability of ``word`` by the transfer contraction ``g^T prod(P o p_w) f / g^T P^N f``."""
    w = _check_word(mix, word)
    br, probs = mix.bridge, mix.kernel.probs
    v = br.g.copy()
    lg = 0.0
    for a in w:
        v = v @ (br.P * probs[:, :, a])
        m = v.max()
        if m <= 0:
            return 0.0
        v /= m
        lg += math.log(m)
    end = float(v @ br.f)
    if end <= 0:
        return 0.0
    return math.exp(lg + math.log(end) - mix.table.log_norm)


def sample_configurations(mix: MixtureSpec, n: int, rng: np.random.Generator):
    """``n`` joint draws: words of shape ``(n, N)`` and hidden paths ``(n, N + 1)``."""
    paths = sample_paths(mix.bridge, n, rng, mix.table)
    u = rng.random((n, mix.N))
    words = _backend.sample_letters(mix.kernel.probs, paths, u)
    return words, paths


def sample_configuration(mix: MixtureSpec, rng: np.random.Generator):
    words, paths = sample_configurations(mix, 1, rng)
    return words[0], paths[0]


def coupling_probability(mix: MixtureSpec, word, path) -> float:
    w = _check_word(mix, word)
    z = np.asarray(path, dtype=np.int64)
    if z.shape != (mix.N + 1,):
        raise LengthMismatch(f"hidden path must have length {mix.N + 1}")
    rho = path_probability(mix.bridge, z, mix.table)
    if rho == 0:
        return 0.0
    return rho * float(np.prod(mix.kernel.probs[z[:-1], z[1:], w]))


def _check_site(mix: MixtureSpec, i: int) -> None:
    if not 0 <= i < mix.N:
        raise IndexOutOfRange(f"site {i} outside 0..{mix.N - 1}")


def site_mean(mix: MixtureSpec, i: int, values=None) -> float:
    _check_site(mix, i)
    J = joint_marginal(mix.bridge, mix.table, (i, i + 1))
    return float((J * mix.kernel.mean_grid(values)).sum())


def correlation(mix: MixtureSpec, i: int, j: int, values=None) -> float:
    """``E[w_i w_j]`` computed from the hidden bridge alone.

    The letter means ``V`` on hidden steps are averaged against the joint law
    of the (at most four) hidden states flanking sites ``i`` and ``j``.
    """
    _check_site(mix, i)
    _check_site(mix, j)
    i, j = sorted((i, j))
    V = mix.kernel.mean_grid(values)
    if i == j:
        vals = np.arange(mix.alphabet_size, dtype=float) if values is None else np.asarray(values, float)
        J = joint_marginal(mix.bridge, mix.table, (i, i + 1))
        return float((J * (mix.kernel.probs @ vals**2)).sum())
    if j == i + 1:
        J = joint_marginal(mix.bridge, mix.table, (i, i + 1, i + 2))
        return float(np.einsum("abc,ab,bc->", J, V, V))
    J = joint_marginal(mix.bridge, mix.table, (i, i + 1, j, j + 1))
    return float(np.einsum("abcd,ab,cd->", J, V, V))


def znrelation_check(spec: MpaSpec, mix: MixtureSpec) -> float:
    """Relative error of ``g^T P^N f = Z_N / lambda^N`` (evaluated in log space)."""
    target = spec._logZ - spec.N * math.log(mix.lam)
    return abs(math.expm1(mix.table.log_norm - target))


@dataclass(frozen=True, eq=False)
class CanonicalForm:
    P: np.ndarray
    probs: np.ndarray
    f: np.ndarray
    g: np.ndarray

    def distance(self, other: "CanonicalForm") -> float:
        return max(float(np.abs(getattr(self, k) - getattr(other, k)).max())
                   for k in ("P", "probs", "f", "g"))


def canonicalize(spec: MpaSpec, tol: float = DEFAULT_TOL) -> CanonicalForm:
    """Representative of the class of specs sharing one bridge mixture.

    Rescaling all letter matrices, rescaling the boundary vectors, or a
    diagonal similarity ``D M^a D^-1`` with ``x -> D x``, ``y -> D^-1 y``
    all leave the result unchanged. ``f`` is normalized to sum 1 and ``g``
    is scaled so that ``g^T P^N f = 1``; a rescaled boundary vector therefore
    leaves no trace.
    """
    mix = decompose(spec, tol=tol)
    br = mix.bridge
    s = br.f.sum()
    g = br.g * s * math.exp(-mix.table.log_norm)
    probs = np.where(mix.kernel.reachable[:, :, None], mix.kernel.probs, 0.0)
    return CanonicalForm(_frozen(br.P), _frozen(probs), _frozen(br.f / s), _frozen(g))


def stationary_bridge(P, length: int) -> BridgeSpec:
    """Bridge started from the invariant law ``pi`` of ``P`` with flat end weight."""
    pi = stationary_distribution(P)
    return BridgeSpec(P, np.ones(len(pi)), pi, length)


def one_dependent_spec(q, probs, N: int) -> MpaSpec:
    """Rank-one construction ``M = 1 q^T``: hidden states i.i.d. ``q``, letters from ``probs``.

    The resulting measure is stationary and one-dependent.
    """
    q = np.asarray(q, dtype=float)
    probs = np.asarray(probs, dtype=float)
    if np.any(q <= 0):
        raise ValueError("q must be strictly positive")
    q = q / q.sum()
    B = q.shape[0]
    mats = q[None, None, :] * np.moveaxis(probs, 2, 0)
    return MpaSpec(mats, N, x=np.ones(B), y=q)


def to_json(mix: MixtureSpec) -> dict:
    br = mix.bridge
    return {
        "N": mix.N,
        "states": br.states,
        "alphabet": mix.alphabet_size,
        "lambda": mix.lam,
        "P": br.P.tolist(),
        "f": br.f.tolist(),
        "g": br.g.tolist(),
        "kernel": mix.kernel.probs.tolist(),
        "reachable": mix.kernel.reachable.astype(int).tolist(),
    }


def from_json(obj: dict) -> MixtureSpec:
    probs = np.array(obj["kernel"], dtype=float)
    P = np.array(obj["P"], dtype=float)
    reach = np.array(obj["reachable"], dtype=bool) if "reachable" in obj else P > 0
    bridge = BridgeSpec(P, obj["f"], obj["g"], int(obj["N"]) + 1)
    return MixtureSpec(bridge, MarginalKernel(probs, reach), float(obj.get("lambda", 1.0)))


def load(path) -> MixtureSpec:
    return from_json(json.loads(Path(path).read_text()))


def dump(mix: MixtureSpec, path) -> None:
    Path(path).write_text(json.dumps(to_json(mix), indent=2, sort_keys=True) + "\n")
