"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the numpy fallback.
Set ``MPA_BRIDGE_PURE=1`` to force the fallback at import time, or call
:func:`set_backend` at runtime.
"""

from __future__ import annotations

import os
from contextlib import contextmanager
from types import ModuleType

import numpy as np

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

_BACKENDS: dict[str, ModuleType] = {"python": _kernels_py}
if _compiled is not None:
    _BACKENDS["cython"] = _compiled

_active = "cython" if _compiled is not None and not os.environ.get("MPA_BRIDGE_PURE") else "python"


def available() -> list[str]:
    return sorted(_BACKENDS)


def name() -> str:
    return _active


def set_backend(which: str) -> None:
    global _active
    if which not in _BACKENDS:
        raise ValueError(f"unknown or unavailable backend {which!r}; have {available()}")
    _active = which


@contextmanager
def using(which: str):
    prev = _active
    set_backend(which)
    try:
        yield
    finally:
        set_backend(prev)


def _c(a, dtype=float):
    return np.ascontiguousarray(a, dtype=dtype)


def sample_bridge(P, hhat, init_w, u) -> np.ndarray:
    return _BACKENDS[_active].sample_bridge(_c(P), _c(hhat), _c(init_w), _c(u))


def sample_letters(probs, paths, u) -> np.ndarray:
    return _BACKENDS[_active].sample_letters(_c(probs), _c(paths, np.int64), _c(u))


def word_log_weights(mats, left, right, words) -> np.ndarray:
    return _BACKENDS[_active].word_log_weights(_c(mats), _c(left), _c(right), _c(words, np.int64))
