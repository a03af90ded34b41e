"""Nonnegative matrix utilities: irreducibility, Perron pair, Doob transform.

All matrices are dense float64 arrays. Functions never modify their inputs and
return fresh read-only arrays, so results can be shared across threads.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import NoConvergence, NotAnEigenpair, NotIrreducible

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 10**6
ROW_SUM_TOL = 1e-9


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def as_nonneg_matrix(M) -> np.ndarray:
    """Validate a square, finite, entrywise nonnegative matrix."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 1:
        raise ValueError(f"expected a nonempty square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    if np.any(M < 0):
        raise ValueError("matrix has negative entries")
    return _frozen(M)


def check_stochastic(P, atol: float = 1e-12) -> np.ndarray:
    P = as_nonneg_matrix(P)
    dev = np.abs(P.sum(axis=1) - 1.0).max()
    if dev > atol:
        raise ValueError(f"rows do not sum to 1 (max deviation {dev:.3e})")
    return P


@dataclass(frozen=True)
class PerronPair:
    """Perron eigenvalue with its positive right eigenvector (summing to 1)."""

    lam: float
    evec: np.ndarray
    residual: float


def _reachable(adj: np.ndarray, start: int) -> np.ndarray:
    seen = np.zeros(adj.shape[0], dtype=bool)
    seen[start] = True
    queue = deque([start])
    while queue:
        b = queue.popleft()
        for c in np.flatnonzero(adj[b] & ~seen):
            seen[c] = True
            queue.append(c)
    return seen


def is_irreducible(M) -> bool:
    """True iff the support graph of ``M`` is strongly connected."""
    adj = as_nonneg_matrix(M) > 0
    return bool(_reachable(adj, 0).all() and _reachable(adj.T, 0).all())


def eigen_residual(M, lam: float, e) -> float:
    """Scale-free residual ``|Me - lam e|_inf / (lam * sum(e))``."""
    M = np.asarray(M, dtype=float)
    e = np.asarray(e, dtype=float)
    return float(np.abs(M @ e - lam * e).max() / (lam * e.sum()))


def perron(M, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> PerronPair:
    """Perron eigenpair of an irreducible nonnegative matrix by power iteration.

    The iteration runs on ``M / s + I`` with ``s`` the largest entry of ``M``:
    the shift makes an irreducible matrix primitive without moving its
    eigenvectors, so convergence does not depend on the period of ``M``, and
    dividing by ``s`` first makes the iterates identical for ``M`` and ``c M``.

    Raises
    ------
    NotIrreducible
        If the support graph of ``M`` is not strongly connected.
    NoConvergence
        If the residual is still above ``tol`` after ``max_iter`` steps. The
        last iterate is attached to the exception as ``pair``.
    """
    M = as_nonneg_matrix(M)
    if not is_irreducible(M):
        raise NotIrreducible("Perron pair requires an irreducible matrix")
    n = M.shape[0]
    scale = float(M.max())
    if scale == 0:
        # a single zero entry: the only irreducible nonnegative matrix with no positive entry
        return PerronPair(0.0, _frozen(np.ones(1)), 0.0)
    A = M / scale
    v = np.full(n, 1.0 / n)
    lam, res = 0.0, np.inf
    for _ in range(max_iter):
        Av = A @ v
        lam = Av.sum()
        res = np.abs(Av - lam * v).max() / lam
        if res <= tol:
            return PerronPair(float(scale * lam), _frozen(v), float(res))
        w = Av + v
        v = w / w.sum()
    raise NoConvergence(
        f"power iteration stalled at residual {res:.3e} after {max_iter} steps",
        pair=PerronPair(float(scale * lam), _frozen(v), float(res)),
    )


def _normalize_rows(P: np.ndarray, rows: np.ndarray) -> None:
    sums = P[rows].sum(axis=1)
    bad = np.abs(sums - 1.0) > ROW_SUM_TOL
    if bad.any():
        worst = np.abs(sums - 1.0).max()
        raise NotAnEigenpair(f"Doob transform rows deviate from 1 by up to {worst:.3e}")
    P[rows] /= sums[:, None]


def doob_transform(M, pair: PerronPair) -> np.ndarray:
    """Stochastic matrix ``P[b, b'] = M[b, b'] e[b'] / (lam e[b])``."""
    M = as_nonneg_matrix(M)
    e = np.asarray(pair.evec, dtype=float)
    P = M * e[None, :] / (pair.lam * e[:, None])
    _normalize_rows(P, np.arange(M.shape[0]))
    return _frozen(P)


def exact_doob_from_closed_form(M, lam: float, e, interior=None, lump_into: int | None = None) -> np.ndarray:
    """Doob transform with an analytically known eigenpair.

    Truncations of infinite matrices satisfy the eigen-equation only away from
    the cut. ``interior`` (boolean mask, default all rows) selects the rows on
    which the equation is checked to 1e-9. With ``lump_into`` set, the missing
    mass of every non-interior row is moved onto that column so the result is
    exactly stochastic; this is harmless when the column is a state the
    weighted paths cannot use.
    """
    M = as_nonneg_matrix(M)
    n = M.shape[0]
    e = np.asarray(e, dtype=float)
    if e.shape != (n,) or np.any(e <= 0) or not np.all(np.isfinite(e)):
        raise NotAnEigenpair("closed-form eigenvector must be finite and strictly positive")
    if lam <= 0:
        raise NotAnEigenpair("closed-form eigenvalue must be positive")
    interior = np.ones(n, dtype=bool) if interior is None else np.asarray(interior, dtype=bool)
    if interior.any():
        r = np.abs((M @ e - lam * e)[interior]).max() / (lam * e.sum())
        if r > ROW_SUM_TOL:
            raise NotAnEigenpair(f"eigen-equation residual {r:.3e} on interior rows")
    P = M * e[None, :] / (lam * e[:, None])
    _normalize_rows(P, np.flatnonzero(interior))
    edge = np.flatnonzero(~interior)
    if edge.size:
        if lump_into is None:
            _normalize_rows(P, edge)
        else:
            deficit = 1.0 - P[edge].sum(axis=1)
            if np.any(deficit < -ROW_SUM_TOL):
                raise NotAnEigenpair("truncation rows exceed unit mass; cannot lump")
            P[edge, lump_into] += np.clip(deficit, 0.0, None)
    return _frozen(P)


def stationary_distribution(P, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> np.ndarray:
    """Invariant law of an irreducible stochastic matrix (power iteration on the transpose)."""
    P = check_stochastic(P, atol=ROW_SUM_TOL)
    if not is_irreducible(P):
        raise NotIrreducible("stationary distribution requires an irreducible chain")
    n = P.shape[0]
    pi = np.full(n, 1.0 / n)
    res = np.inf
    for _ in range(max_iter):
        nxt = pi @ P
        res = np.abs(nxt - pi).max()
        if res <= tol * pi.max():
            nxt /= nxt.sum()
            return _frozen(nxt)
        pi = 0.5 * (pi + nxt)
        pi /= pi.sum()
    raise NoConvergence(f"stationary iteration stalled at {res:.3e}")
