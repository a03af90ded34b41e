"""Matrix product ansatz measures on words of fixed length.

A measure is given by one nonnegative ``|B| x |B|`` matrix per letter and
either a pair of boundary vectors (open chain) or a trace (ring). Words are
integer sequences with letters ``0..|A|-1``; sites are 0-based.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _backend
from .errors import DegenerateNormalization, IndexOutOfRange, LengthMismatch, NotIrreducible
from .spectral import is_irreducible

def _frozen(a, dtype=float) -> np.ndarray:
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class MpaSpec:
    """Letter matrices ``matrices[a]`` plus boundary; ``x``/``y`` are None for the trace form."""

    matrices: np.ndarray
    N: int
    x: np.ndarray | None = None
    y: np.ndarray | None = None
    _logZ: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        mats = np.asarray(self.matrices, dtype=float)
        if mats.ndim != 3 or mats.shape[1] != mats.shape[2] or mats.shape[0] < 1:
            raise ValueError(f"matrices must have shape (|A|, |B|, |B|), got {mats.shape}")
        if not np.all(np.isfinite(mats)) or np.any(mats < 0):
            raise ValueError("letter matrices must be finite and nonnegative")
        if int(self.N) < 1:
            raise ValueError("word length N must be positive")
        object.__setattr__(self, "matrices", _frozen(mats))
        object.__setattr__(self, "N", int(self.N))
        if (self.x is None) != (self.y is None):
            raise ValueError("give both boundary vectors or neither (trace form)")
        if self.x is not None:
            B = mats.shape[1]
            for nm in ("x", "y"):
                v = np.asarray(getattr(self, nm), dtype=float)
                if v.shape != (B,) or not np.all(np.isfinite(v)) or np.any(v < 0):
                    raise ValueError(f"boundary vector {nm} must be finite, nonnegative, length {B}")
                object.__setattr__(self, nm, _frozen(v))
        if not is_irreducible(self.M):
            raise NotIrreducible("the summed matrix M is reducible")
        logZ = self._log_partition()
        if not np.isfinite(logZ):
            raise DegenerateNormalization("partition function vanishes")
        object.__setattr__(self, "_logZ", logZ)

    @property
    def alphabet_size(self) -> int:
        return self.matrices.shape[0]

    @property
    def state_size(self) -> int:
        return self.matrices.shape[1]

    @property
    def is_trace(self) -> bool:
        return self.x is None

    @property
    def M(self) -> np.ndarray:
        return self.matrices.sum(axis=0)

    def _log_partition(self) -> float:
        if self.is_trace:
            return _log_trace_product([self.M] * self.N)
        return _log_vec_chain(self.y, [self.M] * self.N, self.x)


def _log_vec_chain(left, mats, right) -> float:
    """log of ``left^T (prod mats) right`` with per-step rescaling."""
    v = np.array(left, dtype=float)
    lg = 0.0
    for A in mats:
        v = v @ A
        m = v.max()
        if m <= 0:
            return -math.inf
        v /= m
        lg += math.log(m)
    w = float(v @ right)
    return lg + math.log(w) if w > 0 else -math.inf


def _log_trace_product(mats) -> float:
    B = mats[0].shape[0]
    acc = np.eye(B)
    lg = 0.0
    for A in mats:
        acc = acc @ A
        m = acc.max()
        if m <= 0:
            return -math.inf
        acc /= m
        lg += math.log(m)
    t = float(np.trace(acc))
    return lg + math.log(t) if t > 0 else -math.inf


def _check_word(spec: MpaSpec, word, length: int | None = None) -> np.ndarray:
    w = np.asarray(word, dtype=np.int64)
    n = spec.N if length is None else length
    if w.shape != (n,):
        raise LengthMismatch(f"expected a word of length {n}, got shape {w.shape}")
    if np.any(w < 0) or np.any(w >= spec.alphabet_size):
        raise ValueError(f"letters must lie in 0..{spec.alphabet_size - 1}")
    return w


def log_unnormalized_weight(spec: MpaSpec, word) -> float:
    w = _check_word(spec, word)
    mats = [spec.matrices[a] for a in w]
    if spec.is_trace:
        return _log_trace_product(mats)
    return _log_vec_chain(spec.y, mats, spec.x)


def unnormalized_weight(spec: MpaSpec, word, log_domain: bool = False) -> float:
    """Matrix-product contraction of ``word`` (left to right for the open chain).

    With ``log_domain=True`` the natural log is returned instead; use it when
    the linear value would under- or overflow (long words).
    """
    if log_domain:
        return log_unnormalized_weight(spec, word)
    w = _check_word(spec, word)
    if spec.is_trace:
        acc = np.eye(spec.state_size)
        for a in w:
            acc = acc @ spec.matrices[a]
        return float(np.trace(acc))
    v = np.array(spec.y)
    for a in w:
        v = v @ spec.matrices[a]
    return float(v @ spec.x)


def log_partition_function(spec: MpaSpec) -> float:
    return spec._logZ


def partition_function(spec: MpaSpec) -> float:
    """``y^T M^N x`` (or ``Tr M^N``) by repeated vector products; may be ``inf`` for huge N."""
    if spec.is_trace:
        acc = np.eye(spec.state_size)
        for _ in range(spec.N):
            acc = acc @ spec.M
        Z = float(np.trace(acc))
    else:
        v = np.array(spec.y)
        for _ in range(spec.N):
            v = v @ spec.M
        Z = float(v @ spec.x)
    if not Z > 0:
        raise DegenerateNormalization(f"partition function is {Z}")
    return Z


def probability(spec: MpaSpec, word) -> float:
    """Normalized probability; falls back to the log domain when linear values overflow."""
    with np.errstate(over="ignore", under="ignore"):
        Z = partition_function(spec)
        if math.isfinite(Z) and Z > 1e-280:
            w = unnormalized_weight(spec, word)
            if math.isfinite(w) and (w == 0 or w > 1e-280):
                return w / Z
    lw = log_unnormalized_weight(spec, word)
    return math.exp(lw - spec._logZ) if lw > -math.inf else 0.0


def log_probability(spec: MpaSpec, word) -> float:
    return log_unnormalized_weight(spec, word) - spec._logZ


def log_probabilities(spec: MpaSpec, words) -> np.ndarray:
    """Vectorized log-probabilities of many words (open chain via the compiled kernel)."""
    words = np.atleast_2d(np.asarray(words, dtype=np.int64))
    if words.shape[1] != spec.N:
        raise LengthMismatch(f"words must have length {spec.N}")
    if spec.is_trace:
        return np.array([log_unnormalized_weight(spec, w) for w in words]) - spec._logZ
    return _backend.word_log_weights(spec.matrices, spec.y, spec.x, words) - spec._logZ


def cylinder_probability(spec: MpaSpec, start: int, subword) -> float:
    """Probability that the word reads ``subword`` on sites ``start .. start+len-1``."""
    sub = np.asarray(subword, dtype=np.int64)
    k = sub.shape[0] if sub.ndim == 1 else -1
    if k < 1 or start < 0 or start + k > spec.N:
        raise IndexOutOfRange(f"cylinder [{start}, {start + k}) outside 0..{spec.N}")
    _check_word(spec, sub, length=k)
    mats = [spec.M] * start + [spec.matrices[a] for a in sub] + [spec.M] * (spec.N - start - k)
    if spec.is_trace:
        lw = _log_trace_product(mats)
    else:
        lw = _log_vec_chain(spec.y, mats, spec.x)
    return math.exp(lw - spec._logZ) if lw > -math.inf else 0.0


def coupling_probability(spec: MpaSpec, word, path) -> float:
    """Joint weight of a word and a hidden path, ``y[z0] prod M^{w_i}[z_i, z_{i+1}] x[z_N] / Z``."""
    if spec.is_trace:
        raise ValueError("the coupling is defined for the open-chain form only")
    w = _check_word(spec, word)
    z = np.asarray(path, dtype=np.int64)
    if z.shape != (spec.N + 1,):
        raise LengthMismatch(f"hidden path must have length {spec.N + 1}")
    val = spec.y[z[0]] * spec.x[z[-1]]
    for i, a in enumerate(w):
        val *= spec.matrices[a, z[i], z[i + 1]]
    if val == 0:
        return 0.0
    return math.exp(math.log(val) - spec._logZ)


def from_mixture(mix) -> MpaSpec:
    """Open-chain spec with ``M^a = P * p(., ., a)``, ``x = f``, ``y = g``; then ``sum_a M^a = P``."""
    bridge = mix.bridge
    mats = bridge.P[None, :, :] * np.moveaxis(mix.kernel.probs, 2, 0)
    return MpaSpec(mats, bridge.N, x=bridge.f, y=bridge.g)


def to_json(spec: MpaSpec) -> dict:
    boundary = {"type": "trace"} if spec.is_trace else {
        "type": "vectors", "x": spec.x.tolist(), "y": spec.y.tolist()}
    return {
        "alphabet": spec.alphabet_size,
        "states": spec.state_size,
        "N": spec.N,
        "boundary": boundary,
        "matrices": {str(a): spec.matrices[a].tolist() for a in range(spec.alphabet_size)},
    }


def from_json(obj: dict) -> MpaSpec:
    A, B = int(obj["alphabet"]), int(obj["states"])
    mats = np.array([obj["matrices"][str(a)] for a in range(A)], dtype=float)
    if mats.shape != (A, B, B):
        raise ValueError(f"matrices do not match alphabet={A}, states={B}")
    bd = obj["boundary"]
    if bd["type"] == "trace":
        return MpaSpec(mats, int(obj["N"]))
    if bd["type"] != "vectors":
        raise ValueError(f"unknown boundary type {bd['type']!r}")
    return MpaSpec(mats, int(obj["N"]), x=bd["x"], y=bd["y"])


def load(path) -> MpaSpec:
    return from_json(json.loads(Path(path).read_text()))


def dump(spec: MpaSpec, path) -> None:
    Path(path).write_text(json.dumps(to_json(spec), indent=2, sort_keys=True) + "\n")
