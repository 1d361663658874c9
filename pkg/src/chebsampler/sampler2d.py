"""Inverse transform sampling in two variables.

``X`` is drawn from the marginal of a low-rank approximant, then ``Y`` from
the conditional slice at ``X``. Each conditional CDF is a weighted sum of
precomputed column antiderivatives, so no density evaluations and no
re-approximation happen while sampling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .chebyshev import ChebSeries, chebyshev_points, clenshaw_eval, indefinite_integral
from .density import as_density, as_domain
from .errors import DegenerateConditionalError, NegativeDensityError, ZeroSliceError
from .lowrank import DEFAULT_TOL_2D, LowRank2D, _eval_many, _stack, aca_approximate, conditional_slice, marginal_x
from .rng import SampleBatch, as_uniform_source
from .sampler1d import DEFAULT_XTOL, Cdf1D, bisection_steps, cdf_from_series, invert_cdf

MAX_REDRAWS = 100
_ROW_CHUNK = 2048


@dataclass(frozen=True, eq=False)
class Sampler2DSession:
    """Everything needed to sample after the density has been discarded."""

    lr: LowRank2D
    marginal_cdf: Cdf1D
    col_antiderivatives: tuple
    col_masses: np.ndarray
    tol: float = DEFAULT_TOL_2D

    @property
    def domain(self):
        return self.lr.domain

    @property
    def rank(self) -> int:
        return self.lr.rank

    @property
    def total_mass(self) -> float:
        return self.marginal_cdf.total_mass


def _session_from_lowrank(lr: LowRank2D, tol: float) -> Sampler2DSession:
    marginal = marginal_x(lr)
    grid = chebyshev_points(max(2 * marginal.degree, 8), lr.domain.x)
    vals = clenshaw_eval(marginal, grid)
    scale = float(np.max(np.abs(vals)))
    # The marginal is a sum of k approximate terms; allow for k-fold error growth.
    floor = -tol * scale * lr.rank
    if np.min(vals) < floor:
        j = int(np.argmin(vals))
        raise NegativeDensityError(f"marginal density is negative at x={float(grid[j])!r}: {float(vals[j])!r}",
                                   x=float(grid[j]))
    cdf = cdf_from_series(marginal, tol, scale)
    antider = tuple(indefinite_integral(c) for c in lr.cols)
    masses = np.array([float(clenshaw_eval(C, lr.domain.y.b)) for C in antider])
    return Sampler2DSession(lr, cdf, antider, masses, tol)


def build_session(f, dom, tol: float = DEFAULT_TOL_2D, **aca_kwargs) -> Sampler2DSession:
    """Low-rank approximation, marginal CDF and column antiderivatives of ``f``.

    Raises
    ------
    NegativeDensityError
        If the marginal dips clearly below zero.
    RankOverflowError, UnresolvedError, NonFiniteError, ZeroMassError
        Propagated from construction.
    """
    lr = aca_approximate(as_density(f, 2), as_domain(dom), tol, **aca_kwargs)
    return _session_from_lowrank(lr, tol)


def _row_weights(session: Sampler2DSession, x: np.ndarray) -> np.ndarray:
    lr = session.lr
    return _eval_many(lr.row_matrix(), lr.domain.x.to_unit(x)) * lr.sigmas


def _zero_mass_floor(session: Sampler2DSession) -> float:
    return session.tol * session.lr.scale * session.domain.y.width


def conditional_cdf_at(session: Sampler2DSession, x0: float) -> Cdf1D:
    """Normalized CDF of ``Y`` given ``X = x0``."""
    series, mass = conditional_slice(session.lr, x0, session.tol)
    w = _row_weights(session, np.array([float(x0)]))[0]
    Q = w @ _stack([C.coeffs for C in session.col_antiderivatives])
    return Cdf1D(ChebSeries(session.domain.y, Q / mass), mass, series)


def sample_2d(session: Sampler2DSession, n: int, random_state=None,
              xtol: float = DEFAULT_XTOL) -> SampleBatch:
    """Draw ``n`` pairs.

    Uniforms are consumed in this order: ``n`` for the ``X`` coordinates,
    then any redraws of ``X`` whose conditional slice has no mass, then
    ``n`` for the ``Y`` coordinates.

    Raises
    ------
    DegenerateConditionalError
        If some draw still hits a massless slice after ``MAX_REDRAWS``
        consecutive redraws.
    """
    if n < 0:
        raise ValueError(f"sample count must be >= 0, got {n}")
    rng = as_uniform_source(random_state)
    dom = session.domain
    ux = rng.random(n)
    x = invert_cdf(session.marginal_cdf, ux, xtol)
    W = _row_weights(session, x)
    mass = W @ session.col_masses
    floor = _zero_mass_floor(session)
    bad = np.flatnonzero(~(mass > floor))
    redraws = 0
    while bad.size:
        redraws += 1
        if redraws > MAX_REDRAWS:
            raise DegenerateConditionalError(
                f"{bad.size} draws kept landing on massless slices after {MAX_REDRAWS} redraws")
        x[bad] = invert_cdf(session.marginal_cdf, rng.random(bad.size), xtol)
        W[bad] = _row_weights(session, x[bad])
        mass[bad] = W[bad] @ session.col_masses
        bad = bad[~(mass[bad] > floor)]
    uy = rng.random(n)
    y = _conditional_inverse(session, W, uy * mass, xtol)
    pts = np.column_stack([x, y]) if n else np.empty((0, 2))
    return SampleBatch(pts, rng.seed, np.column_stack([ux, uy]) if n else np.empty((0, 2)))


def _conditional_inverse(session: Sampler2DSession, W: np.ndarray, targets: np.ndarray,
                         xtol: float) -> np.ndarray:
    cint = _stack([C.coeffs for C in session.col_antiderivatives])
    iv = session.domain.y
    steps = bisection_steps(xtol)
    out = np.empty(W.shape[0])
    evals = np.zeros(W.shape[0], dtype=np.int64)
    for s in range(0, W.shape[0], _ROW_CHUNK):
        e = min(s + _ROW_CHUNK, W.shape[0])
        Q = np.ascontiguousarray(W[s:e] @ cint)
        out[s:e] = _kernels.bisect_rows(Q, np.ascontiguousarray(targets[s:e]), iv.a, iv.b,
                                        steps, evals[s:e])
    return out


def transform_uniforms(session: Sampler2DSession, u, xtol: float = DEFAULT_XTOL) -> np.ndarray:
    """Map an ``(n, 2)`` array of uniforms to pairs without redraws.

    Raises
    ------
    ZeroSliceError
        If a first coordinate lands on a slice with no mass.
    """
    u = np.asarray(u, dtype=float)
    if u.ndim != 2 or u.shape[1] != 2:
        raise ValueError(f"expected uniforms of shape (n, 2), got {u.shape}")
    x = invert_cdf(session.marginal_cdf, u[:, 0], xtol)
    W = _row_weights(session, x)
    mass = W @ session.col_masses
    bad = np.flatnonzero(~(mass > _zero_mass_floor(session)))
    if bad.size:
        raise ZeroSliceError(f"slice at x={float(x[bad[0]])!r} has no mass")
    return np.column_stack([x, _conditional_inverse(session, W, u[:, 1] * mass, xtol)])
