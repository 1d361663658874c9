"""Low-rank approximation of bivariate densities.

A function on ``[a, b] x [c, d]`` is approximated as

    f(x, y) ~ sum_j sigma_j * r_j(x) * c_j(y)

by Gaussian elimination with complete pivoting, first on a tensor
Chebyshev grid to locate pivots, then along the pivot lines to resolve each
factor as a Chebyshev series.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .chebyshev import (
    MAX_LOG2_GRID,
    MIN_LOG2_GRID,
    ChebSeries,
    _fast_coeffs,
    chebyshev_points,
    chop_length,
    clenshaw_unit,
    definite_integral,
)
from .density import Domain2D, as_density, as_domain
from .errors import RankOverflowError, UnresolvedError, ZeroMassError, ZeroSliceError

logger = logging.getLogger(__name__)

DEFAULT_TOL_2D = 1e-12
MAX_RANK = 256
PIVOT_LOG2_MIN = 5
PIVOT_LOG2_MAX = 11
VALIDATION_POINTS = 64
# Allowed growth of the validation residual over the elimination threshold.
VALIDATION_FACTOR = 10.0


@dataclass(frozen=True, eq=False)
class LowRank2D:
    """``sum_j sigmas[j] * rows[j](x) * cols[j](y)`` on ``domain``.

    ``rows[j]`` is a series in ``x`` on ``[a, b]``, ``cols[j]`` a series in
    ``y`` on ``[c, d]``. Terms are ordered by nonincreasing ``sigma``.
    """

    sigmas: np.ndarray
    rows: tuple
    cols: tuple
    domain: Domain2D
    pivots: np.ndarray | None = None
    scale: float = 1.0

    def __post_init__(self):
        s = np.array(self.sigmas, dtype=float).ravel()
        if not (s.size == len(self.rows) == len(self.cols)) or s.size < 1:
            raise ValueError("sigmas, rows and cols must have the same length k >= 1")
        s.setflags(write=False)
        object.__setattr__(self, "sigmas", s)
        object.__setattr__(self, "rows", tuple(self.rows))
        object.__setattr__(self, "cols", tuple(self.cols))

    @property
    def rank(self) -> int:
        return self.sigmas.size

    def __call__(self, x, y):
        return evaluate_2d(self, x, y)

    def row_matrix(self) -> np.ndarray:
        """Row factor coefficients stacked into a ``(k, m + 1)`` array."""
        return _stack([r.coeffs for r in self.rows])

    def col_matrix(self) -> np.ndarray:
        return _stack([c.coeffs for c in self.cols])

    def on_grid(self, xs, ys) -> np.ndarray:
        """Values on the tensor grid ``xs x ys`` as an array ``(len(xs), len(ys))``."""
        R = _eval_many(self.row_matrix(), self.domain.x.to_unit(np.asarray(xs, float)))
        C = _eval_many(self.col_matrix(), self.domain.y.to_unit(np.asarray(ys, float)))
        return (R * self.sigmas) @ C.T

    def __repr__(self):
        return f"LowRank2D(rank={self.rank}, row_degree={max(r.degree for r in self.rows)}, " \
               f"col_degree={max(c.degree for c in self.cols)})"


def _stack(arrays) -> np.ndarray:
    width = max(a.size for a in arrays)
    out = np.zeros((len(arrays), width))
    for i, a in enumerate(arrays):
        out[i, :a.size] = a
    return out


def _eval_many(coeffs: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Evaluate ``k`` stacked series at points ``t``; returns ``(len(t), k)``."""
    t = np.asarray(t, dtype=float).ravel()
    if coeffs.shape[1] >= 9 and t.size > coeffs.shape[0]:
        return np.column_stack([clenshaw_unit(c, t) for c in coeffs])
    b1 = np.zeros((t.size, coeffs.shape[0]))
    b2 = np.zeros_like(b1)
    tt = 2.0 * t[:, None]
    for k in range(coeffs.shape[1] - 1, 0, -1):
        b1, b2 = tt * b1 - b2 + coeffs[:, k], b1
    return t[:, None] * b1 - b2 + coeffs[:, 0]


def _nested_grid(f, dom: Domain2D, p_min: int, p_max: int):
    """Yield ``(n, xs, ys, F)`` on tensor grids of ``2**p + 1`` points a side."""
    n = 2 ** p_min
    xs, ys = chebyshev_points(n, dom.x), chebyshev_points(n, dom.y)
    F = f.sample_checked(xs[:, None], ys[None, :])
    yield n, xs, ys, F
    for _ in range(p_min, p_max):
        n *= 2
        xs, ys = chebyshev_points(n, dom.x), chebyshev_points(n, dom.y)
        G = np.empty((n + 1, n + 1))
        G[::2, ::2] = F
        G[1::2, :] = f.sample_checked(xs[1::2, None], ys[None, :])
        G[::2, 1::2] = f.sample_checked(xs[::2, None], ys[None, 1::2])
        F = G
        yield n, xs, ys, F


def _ge_pivots(F: np.ndarray, threshold: float, max_rank: int):
    """Complete-pivoting elimination on a matrix; returns pivot index pairs."""
    R = F.copy()
    pivots = []
    while True:
        flat = int(np.argmax(np.abs(R)))
        i, j = divmod(flat, R.shape[1])
        piv = R[i, j]
        if abs(piv) <= threshold:
            return pivots
        pivots.append((i, j))
        if len(pivots) > max_rank:
            raise RankOverflowError(f"rank exceeds the cap of {max_rank}")
        R -= np.outer(R[:, j], R[i, :] / piv)


def _eliminate(P: np.ndarray, cols: np.ndarray, rows: np.ndarray):
    """Apply the pivot sequence to slice samples.

    ``P[i, j] = f(px_i, py_j)``; ``cols[:, j]`` samples ``f(., py_j)`` and
    ``rows[i, :]`` samples ``f(px_i, .)``. On return column ``j`` and row
    ``j`` hold the residual after ``j`` elimination steps, restricted to the
    ``j``-th pivot lines; the diagonal of ``P`` holds the pivots.
    """
    P = P.copy()
    cols = cols.copy()
    rows = rows.copy()
    k = P.shape[0]
    for j in range(k):
        d = P[j, j]
        if j + 1 < k:
            cols[:, j + 1:] -= np.outer(cols[:, j], P[j, j + 1:] / d)
            rows[j + 1:, :] -= np.outer(P[j + 1:, j] / d, rows[j, :])
            P[j + 1:, j + 1:] -= np.outer(P[j + 1:, j] / d, P[j, j + 1:])
    return np.diag(P).copy(), cols, rows


def _resolve_lines(f, dom: Domain2D, px, py, threshold: float, max_log2: int):
    """Sample the pivot lines on nested grids until every residual line is resolved.

    Returns the pivots, the residual column coefficients (one per column of
    the result, functions of ``x``) and residual row coefficients (functions
    of ``y``), each chopped at ``threshold``, plus the finest grid used.
    """
    k = len(px)
    P = f.sample_checked(px[:, None], py[None, :])
    xgen = _line_values(lambda xs: f.sample_checked(xs[:, None], py[None, :]), dom.x, max_log2)
    ygen = _line_values(lambda ys: f.sample_checked(px[:, None], ys[None, :]).T, dom.y, max_log2)
    col_coeffs = row_coeffs = None
    pivots = None
    nx = ny = 0
    for nx, Vx in xgen:
        pivots, cols, _ = _eliminate(P, Vx, np.zeros((k, 1)))
        col_coeffs = _chop_all(_fast_coeffs_cols(cols), threshold)
        if col_coeffs is not None:
            break
    if col_coeffs is None:
        raise UnresolvedError(f"row factors not resolved on {nx + 1} points")
    for ny, Vy in ygen:
        pivots, _, rows = _eliminate(P, np.zeros((1, k)), Vy.T)
        row_coeffs = _chop_all(_fast_coeffs_cols(rows.T), threshold)
        if row_coeffs is not None:
            break
    if row_coeffs is None:
        raise UnresolvedError(f"column factors not resolved on {ny + 1} points")
    return pivots, col_coeffs, row_coeffs, max(nx, ny)


def _line_values(sample, iv, max_log2):
    n = 2 ** MIN_LOG2_GRID
    V = sample(chebyshev_points(n, iv))
    yield n, V
    for _ in range(MIN_LOG2_GRID, max_log2):
        n *= 2
        W = np.empty((n + 1, V.shape[1]))
        W[::2] = V
        W[1::2] = sample(chebyshev_points(n, iv)[1::2])
        V = W
        yield n, V


def _fast_coeffs_cols(V: np.ndarray) -> np.ndarray:
    return np.column_stack([_fast_coeffs(V[:, j]) for j in range(V.shape[1])])


def _chop_all(C: np.ndarray, threshold: float):
    out = []
    for j in range(C.shape[1]):
        keep = chop_length(C[:, j], threshold)
        if keep is None:
            return None
        out.append(C[:keep, j])
    return out


def _validation_error(f, lr: LowRank2D, npts: int) -> float:
    """Max abs error on a tensor grid of first-kind Chebyshev points."""
    t = np.cos(np.pi * (np.arange(npts) + 0.5) / npts)
    xs, ys = lr.domain.x.from_unit(t), lr.domain.y.from_unit(t)
    exact = f.sample_checked(xs[:, None], ys[None, :])
    return float(np.max(np.abs(exact - lr.on_grid(xs, ys))))


def aca_approximate(f, dom, tol: float = DEFAULT_TOL_2D, *, max_rank: int = MAX_RANK,
                    pivot_log2: tuple[int, int] = (PIVOT_LOG2_MIN, PIVOT_LOG2_MAX),
                    validate: bool = True) -> LowRank2D:
    """Low-rank approximant of a bivariate black box.

    Elimination runs on a ``(2**p + 1)``-point tensor Chebyshev grid and
    stops once the largest residual entry is at most ``tol * max|f|``. The
    pivot lines are then resolved adaptively. If a line needs more points
    than the pivot grid has, or the residual on an independent validation
    grid exceeds ``VALIDATION_FACTOR * tol * max|f|``, the whole
    procedure restarts on the next finer grid.

    Raises
    ------
    RankOverflowError
        If more than ``max_rank`` terms are needed.
    UnresolvedError
        If the finest pivot grid is not enough.
    NonFiniteError
    """
    f = as_density(f, 2)
    dom = as_domain(dom)
    p_min, p_max = pivot_log2
    last_err = None
    for n, xs, ys, F in _nested_grid(f, dom, p_min, p_max):
        scale = float(np.max(np.abs(F)))
        if scale == 0.0:
            raise ZeroMassError("density vanishes on the whole pivot grid")
        threshold = tol * scale
        pivots = _ge_pivots(F, threshold, max_rank)
        k = len(pivots)
        if 2 * k > n + 1:
            logger.debug("grid %d: rank %d too close to grid size, refining", n + 1, k)
            continue
        I = np.array([i for i, _ in pivots])
        J = np.array([j for _, j in pivots])
        try:
            d, col_c, row_c, n_line = _resolve_lines(f, dom, xs[I], ys[J], threshold, MAX_LOG2_GRID)
        except UnresolvedError:
            if n == 2 ** p_max:
                raise
            continue
        if n_line > n and n < 2 ** p_max:
            logger.debug("grid %d: lines need %d points, refining", n + 1, n_line + 1)
            continue
        lr = _assemble(d, col_c, row_c, dom, np.column_stack([xs[I], ys[J]]), scale)
        if not validate:
            return lr
        last_err = _validation_error(f, lr, VALIDATION_POINTS)
        if last_err <= VALIDATION_FACTOR * threshold:
            return lr
        logger.debug("grid %d: validation residual %.3g, refining", n + 1, last_err / scale)
    raise UnresolvedError(
        f"low-rank approximation not resolved on {2 ** p_max + 1}^2 grid"
        + (f" (relative residual {last_err / scale:.3g})" if last_err is not None else ""))


def _assemble(d, col_c, row_c, dom, pivots, scale) -> LowRank2D:
    """Normalize residual lines into ``(sigma, r, c)`` triples sorted by sigma."""
    sig = np.abs(d)
    rows = [ChebSeries(dom.x, cc / abs(dj)) for cc, dj in zip(col_c, d)]
    cols = [ChebSeries(dom.y, rc / dj) for rc, dj in zip(row_c, d)]
    order = np.argsort(-sig, kind="stable")
    return LowRank2D(sig[order], [rows[i] for i in order], [cols[i] for i in order], dom,
                     pivots[order], scale)


def evaluate_2d(lr: LowRank2D, x, y):
    """``sum_j sigma_j r_j(x) c_j(y)`` for broadcastable ``x`` and ``y``."""
    x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValueError("evaluation points must be finite")
    R = _eval_many(lr.row_matrix(), lr.domain.x.to_unit(x.ravel()))
    C = _eval_many(lr.col_matrix(), lr.domain.y.to_unit(y.ravel()))
    out = np.sum(R * C * lr.sigmas, axis=1)
    return float(out[0]) if x.ndim == 0 else out.reshape(x.shape)


def _combine(series, weights, iv) -> ChebSeries:
    C = _stack([s.coeffs for s in series])
    return ChebSeries(iv, np.asarray(weights, float) @ C)


def col_integrals(lr: LowRank2D) -> np.ndarray:
    return np.array([definite_integral(c) for c in lr.cols])


def marginal_x(lr: LowRank2D) -> ChebSeries:
    """``x -> int_c^d f~(x, y) dy`` as one series on ``[a, b]``."""
    return _combine(lr.rows, lr.sigmas * col_integrals(lr), lr.domain.x)


def conditional_slice(lr: LowRank2D, x0: float, tol: float = DEFAULT_TOL_2D):
    """Unnormalized slice ``y -> f~(x0, y)`` and its mass ``int_c^d f~(x0, y) dy``.

    Raises
    ------
    ZeroSliceError
        If the mass is at most ``tol * lr.scale * (d - c)``.
    """
    t = lr.domain.x.to_unit(np.array([float(x0)]))
    w = lr.sigmas * _eval_many(lr.row_matrix(), t)[0]
    series = _combine(lr.cols, w, lr.domain.y)
    mass = definite_integral(series)
    if not mass > tol * lr.scale * lr.domain.y.width:
        raise ZeroSliceError(f"slice at x={float(x0)!r} has mass {mass:.3e}")
    return series, mass


__all__ = [
    "LowRank2D",
    "aca_approximate",
    "evaluate_2d",
    "marginal_x",
    "conditional_slice",
    "col_integrals",
]
