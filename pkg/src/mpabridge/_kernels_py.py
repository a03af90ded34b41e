"""Pure numpy implementations of the hot kernels.

Semantics match ``_kernels.pyx`` exactly: both consume the same pre-drawn
uniforms and pick states with the same inverse-CDF rule, so a fixed seed gives
identical samples on either backend.
"""

from __future__ import annotations

import numpy as np


def _pick(w: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Row-wise inverse CDF: first index whose running sum exceeds ``u * total``."""
    cum = np.cumsum(w, axis=1)
    target = u * cum[:, -1]
    hit = target[:, None] < cum
    idx = hit.argmax(axis=1)
    # u * total can round up to total; fall back to the last positive weight
    miss = ~hit.any(axis=1)
    if miss.any():
        last = w.shape[1] - 1 - np.argmax(w[miss, ::-1] > 0, axis=1)
        idx[miss] = last
    return idx.astype(np.int64)


def sample_bridge(P: np.ndarray, hhat: np.ndarray, init_w: np.ndarray, u: np.ndarray) -> np.ndarray:
    n, L = u.shape
    B = P.shape[0]
    out = np.empty((n, L), dtype=np.int64)
    out[:, 0] = _pick(np.broadcast_to(init_w, (n, B)), u[:, 0])
    for k in range(L - 1):
        w = P[out[:, k]] * hhat[k + 1]
        out[:, k + 1] = _pick(w, u[:, k + 1])
    return out


def sample_letters(probs: np.ndarray, paths: np.ndarray, u: np.ndarray) -> np.ndarray:
    n, N = u.shape
    out = np.empty((n, N), dtype=np.int64)
    for i in range(N):
        w = probs[paths[:, i], paths[:, i + 1]]
        out[:, i] = _pick(w, u[:, i])
    return out


def word_log_weights(mats: np.ndarray, left: np.ndarray, right: np.ndarray, words: np.ndarray) -> np.ndarray:
    n, N = words.shape
    v = np.repeat(left[None, :], n, axis=0)
    logs = np.zeros(n)
    for i in range(N):
        col = words[:, i]
        for a in range(mats.shape[0]):
            rows = col == a
            if rows.any():
                v[rows] = v[rows] @ mats[a]
        m = v.max(axis=1)
        pos = m > 0
        v[pos] /= m[pos, None]
        logs[pos] += np.log(m[pos])
        logs[~pos] = -np.inf
    w = v @ right
    with np.errstate(divide="ignore"):
        return np.where(w > 0, logs + np.log(np.where(w > 0, w, 1.0)), -np.inf)
