"""Compiled inner loops: blocked Clenshaw recurrences and bisection.

Points are processed in blocks of ``_BLOCK`` so that the recurrence over
coefficients runs across independent points, which lets the compiler
vectorize it. All kernels release the GIL.
"""

import numba
import numpy as np

_BLOCK = 32


@numba.njit(cache=True, nogil=True)
def clenshaw_many(c, t):
    """Evaluate ``sum_k c[k] T_k(t)`` for every entry of the 1-D array ``t``."""
    n = t.size
    out = np.empty(n)
    deg = c.size - 1
    tt = np.empty(_BLOCK)
    b1 = np.empty(_BLOCK)
    b2 = np.empty(_BLOCK)
    for s in range(0, n, _BLOCK):
        w = min(_BLOCK, n - s)
        for p in range(_BLOCK):
            tt[p] = 2.0 * t[s + p] if p < w else 0.0
            b1[p] = 0.0
            b2[p] = 0.0
        for k in range(deg, 0, -1):
            ck = c[k]
            for p in range(_BLOCK):
                tmp = tt[p] * b1[p] - b2[p] + ck
                b2[p] = b1[p]
                b1[p] = tmp
        for p in range(w):
            out[s + p] = 0.5 * tt[p] * b1[p] - b2[p] + c[0]
    return out


@numba.njit(cache=True, nogil=True)
def bisect_many(c, u, a, b, n_iter, evals):
    """Bisection for ``F(x) = u`` with ``F`` the series ``c`` on ``[a, b]``.

    ``evals[i]`` is incremented once per series evaluation spent on ``u[i]``.
    """
    n = u.size
    out = np.empty(n)
    deg = c.size - 1
    scale = 2.0 / (b - a)
    shift = (a + b) / (b - a)
    lo = np.empty(_BLOCK)
    hi = np.empty(_BLOCK)
    mid = np.empty(_BLOCK)
    tt = np.empty(_BLOCK)
    b1 = np.empty(_BLOCK)
    b2 = np.empty(_BLOCK)
    for s in range(0, n, _BLOCK):
        w = min(_BLOCK, n - s)
        for p in range(_BLOCK):
            lo[p] = a
            hi[p] = b
        for _ in range(n_iter):
            for p in range(_BLOCK):
                mid[p] = 0.5 * (lo[p] + hi[p])
                tt[p] = 2.0 * (scale * mid[p] - shift)
                b1[p] = 0.0
                b2[p] = 0.0
            for k in range(deg, 0, -1):
                ck = c[k]
                for p in range(_BLOCK):
                    tmp = tt[p] * b1[p] - b2[p] + ck
                    b2[p] = b1[p]
                    b1[p] = tmp
            for p in range(w):
                val = 0.5 * tt[p] * b1[p] - b2[p] + c[0]
                evals[s + p] += 1
                if val < u[s + p]:
                    lo[p] = mid[p]
                else:
                    hi[p] = mid[p]
        for p in range(w):
            out[s + p] = 0.5 * (lo[p] + hi[p])
    return out


@numba.njit(cache=True, nogil=True)
def bisect_rows(q, target, a, b, n_iter, evals):
    """Like :func:`bisect_many` but row ``i`` of ``q`` is the series for point ``i``."""
    n = q.shape[0]
    deg = q.shape[1] - 1
    out = np.empty(n)
    scale = 2.0 / (b - a)
    shift = (a + b) / (b - a)
    lo = np.empty(_BLOCK)
    hi = np.empty(_BLOCK)
    mid = np.empty(_BLOCK)
    tt = np.empty(_BLOCK)
    b1 = np.empty(_BLOCK)
    b2 = np.empty(_BLOCK)
    blk = np.zeros((deg + 1, _BLOCK))
    for s in range(0, n, _BLOCK):
        w = min(_BLOCK, n - s)
        for p in range(w):
            for k in range(deg + 1):
                blk[k, p] = q[s + p, k]
        for p in range(w, _BLOCK):
            for k in range(deg + 1):
                blk[k, p] = 0.0
        for p in range(_BLOCK):
            lo[p] = a
            hi[p] = b
        for _ in range(n_iter):
            for p in range(_BLOCK):
                mid[p] = 0.5 * (lo[p] + hi[p])
                tt[p] = 2.0 * (scale * mid[p] - shift)
                b1[p] = 0.0
                b2[p] = 0.0
            for k in range(deg, 0, -1):
                for p in range(_BLOCK):
                    tmp = tt[p] * b1[p] - b2[p] + blk[k, p]
                    b2[p] = b1[p]
                    b1[p] = tmp
            for p in range(w):
                val = 0.5 * tt[p] * b1[p] - b2[p] + blk[0, p]
                evals[s + p] += 1
                if val < target[s + p]:
                    lo[p] = mid[p]
                else:
                    hi[p] = mid[p]
        for p in range(w):
            out[s + p] = 0.5 * (lo[p] + hi[p])
    return out
