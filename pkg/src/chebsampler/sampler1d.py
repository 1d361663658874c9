"""Inverse transform sampling in one variable.

The density is replaced by a Chebyshev interpolant, integrated exactly in
coefficient space to obtain the CDF, and the CDF is inverted pointwise by
bisection.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .chebyshev import (
    DEFAULT_TOL,
    ChebSeries,
    build_approximant,
    chebyshev_points,
    clenshaw_eval,
    indefinite_integral,
)
from .density import Interval, as_density, as_interval
from .errors import NegativeDensityError, ZeroMassError
from .rng import SampleBatch, as_uniform_source

DEFAULT_XTOL = 1e-14


@dataclass(frozen=True, eq=False)
class Cdf1D:
    """Normalized CDF as a Chebyshev series.

    Attributes
    ----------
    F : ChebSeries
        The CDF, with ``F(a) = 0`` and ``F(b) = 1`` up to rounding.
    total_mass : float
        Integral of the unnormalized approximant over the interval.
    density : ChebSeries or None
        The unnormalized density approximant ``F`` was built from.
    """

    F: ChebSeries
    total_mass: float
    density: ChebSeries | None = None

    @property
    def interval(self) -> Interval:
        return self.F.interval

    def __call__(self, x):
        return clenshaw_eval(self.F, x)

    def pdf(self, x):
        if self.density is None:
            raise AttributeError("this CDF was built without its density")
        return clenshaw_eval(self.density, x) / self.total_mass


def cdf_from_series(density: ChebSeries, tol: float = DEFAULT_TOL, scale: float | None = None) -> Cdf1D:
    """Normalize the running integral of an approximant into a CDF.

    ``scale`` is the magnitude ``max|f|`` used for the zero-mass test;
    by default it is taken from the approximant's values on its own grid.
    """
    if scale is None:
        grid = chebyshev_points(max(density.degree, 1), density.interval)
        scale = float(np.max(np.abs(clenshaw_eval(density, grid))))
    F = indefinite_integral(density)
    total = float(clenshaw_eval(F, density.interval.b))
    if not total > tol * scale * density.interval.width:
        raise ZeroMassError(f"total mass {total:.3e} is not positive at tolerance {tol:g}")
    return Cdf1D(ChebSeries(F.interval, F.coeffs / total), total, density)


def cdf_from_density(f, iv, tol: float = DEFAULT_TOL) -> Cdf1D:
    """Build the CDF of an unnormalized univariate density.

    Raises
    ------
    NegativeDensityError
        If a sample on the construction grid is below ``-tol * max|f|``.
    ZeroMassError
        If the integral is not positive.
    UnresolvedError, NonFiniteError
        Propagated from :func:`build_approximant`.
    """
    f = as_density(f, 1)
    iv = as_interval(iv)
    series, values = build_approximant(f, iv, tol, return_values=True)
    scale = float(np.max(np.abs(values)))
    neg = np.flatnonzero(values < -tol * scale)
    if neg.size:
        x = chebyshev_points(values.size - 1, iv)
        j = neg[np.argmin(values[neg])]
        raise NegativeDensityError(f"density is negative at x={float(x[j])!r}: {float(values[j])!r}", x=float(x[j]))
    if scale == 0.0:
        raise ZeroMassError("density vanishes on the whole construction grid")
    return cdf_from_series(series, tol, scale)


def bisection_steps(xtol: float) -> int:
    """Number of halvings of ``[a, b]`` until the bracket is below ``xtol * (b - a)``."""
    if not 0.0 < xtol < 1.0:
        raise ValueError(f"xtol must lie in (0, 1), got {xtol}")
    steps, width = 0, 1.0
    while width >= xtol:
        width *= 0.5
        steps += 1
    return steps


def invert_cdf(cdf: Cdf1D, u, xtol: float = DEFAULT_XTOL, *, return_evals: bool = False):
    """Solve ``F(x) = u`` by bisection on the whole interval.

    Every ``u`` costs the same number of series evaluations,
    ``bisection_steps(xtol)`` (47 for the default ``xtol``). Works on a
    scalar or an array of ``u``. With ``return_evals`` the number of
    series evaluations spent on each ``u`` is returned as well.

    In flat stretches of ``F`` (where the density vanishes) any preimage
    is acceptable; the one found is whatever the midpoint rule lands on.
    """
    u_arr = np.asarray(u, dtype=float)
    if np.any((u_arr < 0.0) | (u_arr > 1.0)) or not np.all(np.isfinite(u_arr)):
        raise ValueError("u must lie in [0, 1]")
    iv = cdf.interval
    flat = np.ascontiguousarray(u_arr.ravel())
    evals = np.zeros(flat.size, dtype=np.int64)
    x = _kernels.bisect_many(np.ascontiguousarray(cdf.F.coeffs), flat, iv.a, iv.b,
                             bisection_steps(xtol), evals)
    if u_arr.ndim == 0:
        x, evals = float(x[0]), int(evals[0])
    else:
        x, evals = x.reshape(u_arr.shape), evals.reshape(u_arr.shape)
    return (x, evals) if return_evals else x


def sample_1d_from_cdf(cdf: Cdf1D, n: int, random_state=None, xtol: float = DEFAULT_XTOL) -> SampleBatch:
    """Draw ``n`` points from a prebuilt CDF; deterministic given the seed."""
    if n < 0:
        raise ValueError(f"sample count must be >= 0, got {n}")
    rng = as_uniform_source(random_state)
    u = rng.random(n)
    return SampleBatch(invert_cdf(cdf, u, xtol), rng.seed, u)


def sample_1d(f, iv, n: int, random_state=None, tol: float = DEFAULT_TOL,
              xtol: float = DEFAULT_XTOL) -> SampleBatch:
    """Build the CDF of ``f`` on ``iv`` once and draw ``n`` samples.

    ``f`` is evaluated only while the CDF is built.
    """
    if n < 0:
        raise ValueError(f"sample count must be >= 0, got {n}")
    cdf = cdf_from_density(f, iv, tol)
    return sample_1d_from_cdf(cdf, n, random_state, xtol)
