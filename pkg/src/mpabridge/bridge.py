"""Markov bridges: a homogeneous chain reweighted at both ends.

A bridge of length ``L = N + 1`` has law
``g[z_0] prod_i P[z_i, z_{i+1}] f[z_N] / (g^T P^N f)``. It is again Markov,
with time-dependent kernels obtained from the backward functions
``h_k = P^{N-k} f``. Positions along the path are 0-based, ``0 .. N``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import DegenerateNormalization, IndexOutOfRange, LengthMismatch, UnreachableState
from .spectral import check_stochastic


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class BridgeSpec:
    P: np.ndarray
    f: np.ndarray
    g: np.ndarray
    length: int

    def __post_init__(self):
        P = check_stochastic(self.P)
        B = P.shape[0]
        object.__setattr__(self, "P", P)
        for nm in ("f", "g"):
            v = np.asarray(getattr(self, nm), dtype=float)
            if v.shape != (B,) or np.any(v < 0) or not np.all(np.isfinite(v)) or not np.any(v > 0):
                raise ValueError(f"end weight {nm} must be nonnegative, finite, nonzero, length {B}")
            object.__setattr__(self, nm, _frozen(v))
        if int(self.length) < 1:
            raise ValueError("bridge length must be at least 1")
        object.__setattr__(self, "length", int(self.length))

    @property
    def N(self) -> int:
        return self.length - 1

    @property
    def states(self) -> int:
        return self.P.shape[0]


def pinned(P, start: int, end: int, length: int) -> BridgeSpec:
    """Bridge conditioned to start at ``start`` and finish at ``end``."""
    B = np.asarray(P).shape[0]
    g = np.zeros(B)
    f = np.zeros(B)
    g[start] = 1.0
    f[end] = 1.0
    return BridgeSpec(P, f, g, length)


@dataclass(frozen=True, eq=False)
class BackwardTable:
    """Rescaled backward functions: ``h_k = hhat[k] * exp(log_scale[k])``, ``h_N = f``."""

    hhat: np.ndarray
    log_scale: np.ndarray
    log_norm: float

    def h(self, k: int) -> np.ndarray:
        return self.hhat[k] * math.exp(self.log_scale[k])


def backward_table(spec: BridgeSpec) -> BackwardTable:
    L, B = spec.length, spec.states
    hhat = np.empty((L, B))
    log_scale = np.zeros(L)
    m = spec.f.max()
    hhat[-1] = spec.f / m
    log_scale[-1] = math.log(m)
    for k in range(L - 2, -1, -1):
        v = spec.P @ hhat[k + 1]
        m = v.max()
        if m <= 0:
            raise DegenerateNormalization(f"backward function vanishes at position {k}")
        hhat[k] = v / m
        log_scale[k] = log_scale[k + 1] + math.log(m)
    z = float(spec.g @ hhat[0])
    if z <= 0:
        raise DegenerateNormalization("g^T P^N f is zero")
    hhat.setflags(write=False)
    log_scale.setflags(write=False)
    return BackwardTable(hhat, log_scale, math.log(z) + log_scale[0])


def log_normalizer(spec: BridgeSpec, table: BackwardTable | None = None) -> float:
    """``log(g^T P^N f)``."""
    return (table or backward_table(spec)).log_norm


def _check_path(spec: BridgeSpec, path) -> np.ndarray:
    z = np.asarray(path, dtype=np.int64)
    if z.shape != (spec.length,):
        raise LengthMismatch(f"expected a path of length {spec.length}, got shape {z.shape}")
    if np.any(z < 0) or np.any(z >= spec.states):
        raise ValueError("path leaves the state space")
    return z


def path_probability(spec: BridgeSpec, path, table: BackwardTable | None = None) -> float:
    z = _check_path(spec, path)
    w = spec.g[z[0]] * spec.f[z[-1]]
    if w == 0:
        return 0.0
    lw = math.log(w)
    for a, b in zip(z[:-1], z[1:]):
        p = spec.P[a, b]
        if p == 0:
            return 0.0
        lw += math.log(p)
    return math.exp(lw - log_normalizer(spec, table))


def transition_kernel(spec: BridgeSpec, table: BackwardTable, k: int, b: int) -> np.ndarray:
    """Law of the state at position ``k + 1`` given state ``b`` at position ``k``."""
    if not 0 <= k < spec.N:
        raise IndexOutOfRange(f"step {k} outside 0..{spec.N - 1}")
    if table.hhat[k, b] <= 0:
        raise UnreachableState(f"state {b} cannot reach the end weight from position {k}")
    w = spec.P[b] * table.hhat[k + 1]
    return w / w.sum()


def initial_law(spec: BridgeSpec, table: BackwardTable) -> np.ndarray:
    w = spec.g * table.hhat[0]
    return w / w.sum()


def sample_paths(spec: BridgeSpec, n: int, rng: np.random.Generator,
                 table: BackwardTable | None = None) -> np.ndarray:
    """``n`` exact draws, one path per row (shape ``(n, N + 1)``)."""
    table = table or backward_table(spec)
    u = rng.random((n, spec.length))
    return _backend.sample_bridge(spec.P, table.hhat, spec.g * table.hhat[0], u)


def sample_path(spec: BridgeSpec, table: BackwardTable, rng: np.random.Generator) -> np.ndarray:
    return sample_paths(spec, 1, rng, table)[0]


def endpoint_law(spec: BridgeSpec) -> np.ndarray:
    """Joint law of the first and last states, ``m[b, b']``."""
    PN = np.linalg.matrix_power(spec.P, spec.N)
    m = spec.g[:, None] * PN * spec.f[None, :]
    return m / m.sum()


def joint_marginal(spec: BridgeSpec, table: BackwardTable, positions) -> np.ndarray:
    """Joint law of the states at strictly increasing ``positions``; one axis per position."""
    pos = [int(p) for p in positions]
    if not pos or any(b <= a for a, b in zip(pos, pos[1:])) or pos[0] < 0 or pos[-1] > spec.N:
        raise IndexOutOfRange(f"positions {pos} must increase strictly within 0..{spec.N}")
    fwd = spec.g.copy()
    for _ in range(pos[0]):
        fwd = fwd @ spec.P
        fwd /= fwd.max()
    T = fwd
    for prev, cur in zip(pos, pos[1:]):
        step = np.linalg.matrix_power(spec.P, cur - prev)
        T = T[..., :, None] * step
        T /= T.max()
    T = T * table.hhat[pos[-1]]
    return T / T.sum()


def two_point_marginal(spec: BridgeSpec, table: BackwardTable, i: int, j: int) -> np.ndarray:
    if not 0 <= i < j <= spec.N:
        raise IndexOutOfRange(f"need 0 <= i < j <= {spec.N}, got ({i}, {j})")
    return joint_marginal(spec, table, (i, j))
