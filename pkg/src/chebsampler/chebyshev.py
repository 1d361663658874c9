"""Chebyshev series on an interval: construction, evaluation, integration.

A :class:`ChebSeries` represents

    p(x) = sum_k coeffs[k] * T_k(t),    t = 2 (x - a) / (b - a) - 1,

on ``[a, b]``. Grids are the Chebyshev extreme points ordered from ``b``
down to ``a``; a grid with parameter ``n`` has ``n + 1`` points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.fft import dct

from . import _kernels
from .density import DensityFn, Interval, as_density, as_interval
from .errors import UnresolvedError

EPS = np.finfo(float).eps
DEFAULT_TOL = 100 * 2.22e-16
MIN_LOG2_GRID = 3
MAX_LOG2_GRID = 16

# Short series are cheaper through numpy than through a kernel call.
_KERNEL_MIN_COEFFS = 9


@dataclass(frozen=True, eq=False)
class ChebSeries:
    """Immutable Chebyshev expansion on ``interval``."""

    interval: Interval
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float).ravel()
        if c.size == 0:
            raise ValueError("a Chebyshev series needs at least one coefficient")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "interval", as_interval(self.interval))

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def __call__(self, x):
        return clenshaw_eval(self, x)

    def __repr__(self):
        iv = self.interval
        return f"ChebSeries(degree={self.degree}, interval=[{iv.a:g}, {iv.b:g}])"

    def integral(self) -> float:
        return definite_integral(self)

    def cumsum(self) -> ChebSeries:
        return indefinite_integral(self)


def chebyshev_points(n: int, iv=(-1.0, 1.0)) -> np.ndarray:
    """Return ``(a+b)/2 + (b-a)/2 cos(j pi / n)`` for ``j = 0..n``."""
    if n < 1:
        raise ValueError(f"grid parameter must be >= 1, got {n}")
    iv = as_interval(iv)
    t = np.cos(np.pi * np.arange(n + 1) / n)
    # cos(j pi / n) is only antisymmetric up to rounding; make it exact.
    t = 0.5 * (t - t[::-1])
    return iv.from_unit(t)


def direct_coeffs(values) -> np.ndarray:
    """O(n^2) Chebyshev interpolation coefficients from grid values.

    Reference implementation of the DCT-I with explicit cosine sums.
    """
    v = np.asarray(values, dtype=float)
    n = v.size - 1
    if n == 0:
        return v.copy()
    j = np.arange(n + 1)
    w = np.ones(n + 1)
    w[0] = w[-1] = 0.5
    # reduce j*k modulo 2n in integers so the cosine argument stays exact
    c = (2.0 / n) * (np.cos(np.pi * (np.outer(j, j) % (2 * n)) / n) @ (w * v))
    c[0] *= 0.5
    c[-1] *= 0.5
    return c


def _fast_coeffs(v: np.ndarray) -> np.ndarray:
    n = v.size - 1
    c = dct(v, type=1) / n
    c[0] *= 0.5
    c[-1] *= 0.5
    return c


def _is_pow2(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


def coeffs_from_values(values, iv=(-1.0, 1.0)) -> ChebSeries:
    """Interpolate values given at ``chebyshev_points(n, iv)``.

    Grids of ``2**k + 1`` points use the fast cosine transform; other
    lengths fall back to :func:`direct_coeffs`.
    """
    v = np.asarray(values, dtype=float).ravel()
    if v.size == 0:
        raise ValueError("need at least one value")
    n = v.size - 1
    if n == 0:
        c = v.copy()
    elif _is_pow2(n):
        c = _fast_coeffs(v)
    else:
        c = direct_coeffs(v)
    return ChebSeries(as_interval(iv), c)


def _clenshaw_numpy(c: np.ndarray, t: np.ndarray) -> np.ndarray:
    b1 = np.zeros_like(t)
    b2 = np.zeros_like(t)
    tt = 2.0 * t
    for ck in c[:0:-1]:
        b1, b2 = tt * b1 - b2 + ck, b1
    return t * b1 - b2 + c[0]


def clenshaw_unit(c, t):
    """Evaluate coefficients ``c`` at points ``t`` of ``[-1, 1]``."""
    c = np.asarray(c, dtype=float)
    t = np.asarray(t, dtype=float)
    flat = np.ascontiguousarray(t.ravel())
    if c.size >= _KERNEL_MIN_COEFFS:
        out = _kernels.clenshaw_many(np.ascontiguousarray(c), flat)
    else:
        out = _clenshaw_numpy(c, flat)
    if t.ndim == 0:
        return float(out[0])
    return out.reshape(t.shape)


def clenshaw_eval(s: ChebSeries, x):
    """Evaluate ``s`` at ``x`` (scalar or array) by the Clenshaw recurrence.

    Points outside ``s.interval`` are extrapolated, not clamped.
    """
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("evaluation points must be finite")
    return clenshaw_unit(s.coeffs, s.interval.to_unit(x))


def chop_length(coeffs, threshold: float) -> int | None:
    """Number of coefficients to keep, or ``None`` if the tail has not decayed.

    The tail is resolved when the trailing ``max(3, ceil(len/8))``
    coefficients are all at most ``threshold`` in magnitude. The series is
    then cut as short as possible with the discarded coefficients summing
    to at most ``threshold`` in absolute value, which bounds the
    truncation error in the sup norm by ``threshold``.
    """
    a = np.abs(np.asarray(coeffs))
    tail = max(3, math.ceil(a.size / 8))
    if tail >= a.size or np.any(a[-tail:] > threshold):
        return None
    # dropped[i] = sum(a[i:])
    dropped = np.cumsum(a[::-1])[::-1]
    ok = np.flatnonzero(dropped > threshold)
    return int(ok[-1]) + 1 if ok.size else 1


def _nested_values(f: DensityFn, iv: Interval, log2_min: int, log2_max: int):
    """Yield ``(n, values)`` on grids ``2**k + 1``, reusing coarser samples."""
    n = 2 ** log2_min
    values = f.sample_checked(chebyshev_points(n, iv))
    yield n, values
    for _ in range(log2_min, log2_max):
        n *= 2
        fine = np.empty(n + 1)
        fine[::2] = values
        fine[1::2] = f.sample_checked(chebyshev_points(n, iv)[1::2])
        values = fine
        yield n, values


def build_approximant(f, iv, tol: float = DEFAULT_TOL, *, max_log2: int = MAX_LOG2_GRID,
                      return_values: bool = False):
    """Adaptive Chebyshev interpolant of a univariate black box.

    Samples ``f`` on nested grids of 9, 17, 33, ... points until the
    coefficient tail drops below ``tol * max|f(x_j)|``.

    Parameters
    ----------
    f : callable or DensityFn
    iv : Interval or (a, b)
    tol : float
        Relative tolerance in ``[1e-15, 1e-1]``.
    return_values : bool
        Also return the samples on the final grid.

    Raises
    ------
    UnresolvedError
        If ``2**max_log2 + 1`` points do not resolve ``f``.
    NonFiniteError
        If a sample is NaN or infinite.
    """
    if not 1e-15 <= tol <= 1e-1:
        raise ValueError(f"tol must lie in [1e-15, 1e-1], got {tol}")
    f = as_density(f, 1)
    iv = as_interval(iv)
    for n, values in _nested_values(f, iv, MIN_LOG2_GRID, max_log2):
        scale = float(np.max(np.abs(values)))
        c = _fast_coeffs(values)
        if scale == 0.0:
            series = ChebSeries(iv, [0.0])
            return (series, values) if return_values else series
        keep = chop_length(c, tol * scale)
        if keep is not None:
            series = ChebSeries(iv, c[:keep])
            return (series, values) if return_values else series
    raise UnresolvedError(
        f"{f.label}: coefficients did not decay on {n + 1} points; the density "
        "may be non-smooth or need a smaller tolerance")


def indefinite_integral(s: ChebSeries) -> ChebSeries:
    """Antiderivative vanishing at the left endpoint, one degree higher."""
    c = s.coeffs
    n = c.size
    ext = np.zeros(n + 2)
    ext[:n] = c
    beta = np.zeros(n + 1)
    k = np.arange(2, n + 1)
    beta[2:] = (ext[k - 1] - ext[k + 1]) / (2.0 * k)
    beta[1] = ext[0] - 0.5 * ext[2]
    beta *= 0.5 * s.interval.width
    signs = np.where(np.arange(1, n + 1) % 2 == 0, 1.0, -1.0)
    beta[0] = -np.dot(signs, beta[1:])
    return ChebSeries(s.interval, beta)


def definite_integral(s: ChebSeries) -> float:
    """Integral of ``s`` over its interval (Clenshaw-Curtis weights on coefficients)."""
    c = s.coeffs[::2]
    k = np.arange(0, s.coeffs.size, 2)
    return float(0.5 * s.interval.width * np.dot(c, 2.0 / (1.0 - k * k)))


def _golden_max(g, lo: float, hi: float, xtol: float):
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - invphi * (hi - lo)
    x2 = lo + invphi * (hi - lo)
    g1, g2 = g(x1), g(x2)
    while hi - lo > xtol:
        if g1 >= g2:
            hi, x2, g2 = x2, x1, g1
            x1 = hi - invphi * (hi - lo)
            g1 = g(x1)
        else:
            lo, x1, g1 = x1, x2, g2
            x2 = lo + invphi * (hi - lo)
            g2 = g(x2)
    return (x1, g1) if g1 >= g2 else (x2, g2)


def max_abs_on_grid(s: ChebSeries, oversample: int = 10):
    """Location and value of ``max |s|``.

    The maximum over an oversampled Chebyshev grid is refined by
    golden-section search on the neighbouring cells.
    """
    if oversample < 1:
        raise ValueError(f"oversample must be >= 1, got {oversample}")
    npts = oversample * (s.degree + 1)
    if npts < 2:
        npts = 2
    x = chebyshev_points(npts - 1, s.interval)
    vals = np.abs(clenshaw_eval(s, x))
    j = int(np.argmax(vals))
    best_x, best_v = float(x[j]), float(vals[j])
    # grid is descending: x[j+1] < x[j] < x[j-1]
    lo = float(x[min(j + 1, x.size - 1)])
    hi = float(x[max(j - 1, 0)])
    if hi > lo:
        g = lambda t: abs(float(clenshaw_eval(s, t)))  # noqa: E731
        xr, vr = _golden_max(g, lo, hi, xtol=1e-15 * s.interval.width + 4 * EPS * abs(best_x))
        if vr > best_v:
            best_x, best_v = xr, vr
    return best_x, best_v
