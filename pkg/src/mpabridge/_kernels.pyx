# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels. Same contracts as ``_kernels_py``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport log, INFINITY

cnp.import_array()


cdef inline Py_ssize_t _pick_row(const double[::1] w, double u) noexcept nogil:
    cdef Py_ssize_t j, m = w.shape[0], last = -1
    cdef double total = 0.0, acc = 0.0
    for j in range(m):
        total += w[j]
    cdef double target = u * total
    for j in range(m):
        acc += w[j]
        if target < acc:
            return j
    for j in range(m - 1, -1, -1):
        if w[j] > 0:
            return j
    return m - 1


def sample_bridge(const double[:, ::1] P, const double[:, ::1] hhat,
                  const double[::1] init_w, const double[:, ::1] u):
    cdef Py_ssize_t n = u.shape[0], L = u.shape[1], B = P.shape[0]
    cdef Py_ssize_t s, k, j, b
    out_arr = np.empty((n, L), dtype=np.int64)
    cdef cnp.int64_t[:, ::1] out = out_arr
    cdef double[::1] w = np.empty(B)
    with nogil:
        for s in range(n):
            b = _pick_row(init_w, u[s, 0])
            out[s, 0] = b
            for k in range(L - 1):
                for j in range(B):
                    w[j] = P[b, j] * hhat[k + 1, j]
                b = _pick_row(w, u[s, k + 1])
                out[s, k + 1] = b
    return out_arr


def sample_letters(const double[:, :, ::1] probs, const cnp.int64_t[:, ::1] paths,
                   const double[:, ::1] u):
    cdef Py_ssize_t n = u.shape[0], N = u.shape[1]
    cdef Py_ssize_t s, i
    out_arr = np.empty((n, N), dtype=np.int64)
    cdef cnp.int64_t[:, ::1] out = out_arr
    with nogil:
        for s in range(n):
            for i in range(N):
                out[s, i] = _pick_row(probs[paths[s, i], paths[s, i + 1]], u[s, i])
    return out_arr


def word_log_weights(const double[:, :, ::1] mats, const double[::1] left,
                     const double[::1] right, const cnp.int64_t[:, ::1] words):
    cdef Py_ssize_t n = words.shape[0], N = words.shape[1], B = left.shape[0]
    cdef Py_ssize_t s, i, b, c
    cdef cnp.int64_t a
    cdef double mx, acc, lg
    out_arr = np.empty(n)
    cdef double[::1] out = out_arr
    cdef double[::1] v = np.empty(B)
    cdef double[::1] nv = np.empty(B)
    with nogil:
        for s in range(n):
            for b in range(B):
                v[b] = left[b]
            lg = 0.0
            for i in range(N):
                a = words[s, i]
                for c in range(B):
                    nv[c] = 0.0
                for b in range(B):
                    if v[b] != 0.0:
                        for c in range(B):
                            nv[c] += v[b] * mats[a, b, c]
                mx = 0.0
                for c in range(B):
                    if nv[c] > mx:
                        mx = nv[c]
                if mx > 0:
                    for c in range(B):
                        v[c] = nv[c] / mx
                    lg += log(mx)
                else:
                    lg = -INFINITY
                    for c in range(B):
                        v[c] = 0.0
            acc = 0.0
            for b in range(B):
                acc += v[b] * right[b]
            if acc > 0 and lg != -INFINITY:
                out[s] = lg + log(acc)
            else:
                out[s] = -INFINITY
    return out_arr
