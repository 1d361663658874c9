"""Estimator-style wrappers around the samplers.

``fit`` takes the density (a callable or an expression string) and the
bounds of its box, does all the construction work and stores the fitted
state in trailing-underscore attributes. ``sample`` draws new points and
``transform`` maps given uniforms to samples, so the fitted object acts
as a deterministic map from the unit cube to the target distribution.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .chebyshev import DEFAULT_TOL, clenshaw_eval
from .density import Domain2D, as_density, as_domain, as_interval
from .expr import compile_expr
from .lowrank import DEFAULT_TOL_2D, MAX_RANK, aca_approximate
from .rejection import MAX_PROPOSALS, default_hat_1d, default_hat_2d, rejection_sample_1d, rejection_sample_2d
from .sampler1d import DEFAULT_XTOL, cdf_from_density, invert_cdf, sample_1d_from_cdf
from .sampler2d import _session_from_lowrank, conditional_cdf_at, sample_2d, transform_uniforms


def _density(f, arity=None):
    if isinstance(f, str):
        f = compile_expr(f)
    if arity is None:
        arity = getattr(f, "arity", 1)
    return as_density(f, arity)


def _check_uniforms(U, ncols):
    U = check_array(U, ensure_2d=ncols == 2, ensure_all_finite=True, dtype=float)
    if ncols == 1:
        U = U.ravel()
    elif U.shape[1] != 2:
        raise ValueError(f"expected uniforms of shape (n, 2), got {U.shape}")
    if np.any((U < 0.0) | (U > 1.0)):
        raise ValueError("uniforms must lie in [0, 1]")
    return U


def _check_n(n_samples):
    if not isinstance(n_samples, (int, np.integer)) or n_samples < 0:
        raise ValueError(f"n_samples must be a non-negative integer, got {n_samples!r}")
    return int(n_samples)


class ChebyshevSampler(BaseEstimator):
    """Univariate inverse transform sampler.

    Parameters
    ----------
    tol : float, default=100 * eps
        Relative accuracy of the Chebyshev approximant.
    xtol : float, default=1e-14
        Bisection stops once the bracket is below ``xtol * (b - a)``.

    Attributes
    ----------
    cdf_ : Cdf1D
    interval_ : Interval
    degree_ : int
    total_mass_ : float
        Integral of the unnormalized density over the interval.
    n_evals_ : int
        Density evaluations spent by ``fit``; sampling adds none.

    Examples
    --------
    >>> s = ChebyshevSampler().fit("2+cos(100*x)", (-1, 1))
    >>> s.sample(3, random_state=0).shape
    (3,)
    """

    def __init__(self, tol: float = DEFAULT_TOL, xtol: float = DEFAULT_XTOL):
        self.tol = tol
        self.xtol = xtol

    def fit(self, density, bounds):
        f = _density(density, 1)
        start = f.eval_count
        self.cdf_ = cdf_from_density(f, bounds, self.tol)
        self.interval_ = self.cdf_.interval
        self.degree_ = self.cdf_.density.degree
        self.total_mass_ = self.cdf_.total_mass
        self.n_evals_ = f.eval_count - start
        return self

    def sample(self, n_samples: int = 1, random_state=None) -> np.ndarray:
        check_is_fitted(self, "cdf_")
        return sample_1d_from_cdf(self.cdf_, _check_n(n_samples), random_state, self.xtol).points

    def transform(self, U) -> np.ndarray:
        """Map uniforms on ``[0, 1]`` to samples through the inverse CDF."""
        check_is_fitted(self, "cdf_")
        return invert_cdf(self.cdf_, _check_uniforms(U, 1), self.xtol)

    def cdf(self, x) -> np.ndarray:
        check_is_fitted(self, "cdf_")
        return self.cdf_(x)

    def pdf(self, x) -> np.ndarray:
        check_is_fitted(self, "cdf_")
        return self.cdf_.pdf(x)


class LowRankSampler(BaseEstimator):
    """Bivariate inverse transform sampler on a low-rank approximant.

    Parameters
    ----------
    tol : float, default=1e-12
        Relative tolerance for the elimination and the factor series.
    xtol : float, default=1e-14
    max_rank : int, default=256

    Attributes
    ----------
    session_ : Sampler2DSession
    lowrank_ : LowRank2D
    rank_ : int
    total_mass_ : float
    n_evals_ : int
    """

    def __init__(self, tol: float = DEFAULT_TOL_2D, xtol: float = DEFAULT_XTOL,
                 max_rank: int = MAX_RANK):
        self.tol = tol
        self.xtol = xtol
        self.max_rank = max_rank

    def fit(self, density, bounds):
        f = _density(density, 2)
        start = f.eval_count
        lr = aca_approximate(f, as_domain(bounds), self.tol, max_rank=self.max_rank)
        self.session_ = _session_from_lowrank(lr, self.tol)
        self.lowrank_ = lr
        self.rank_ = lr.rank
        self.total_mass_ = self.session_.total_mass
        self.n_evals_ = f.eval_count - start
        return self

    def sample(self, n_samples: int = 1, random_state=None) -> np.ndarray:
        check_is_fitted(self, "session_")
        return sample_2d(self.session_, _check_n(n_samples), random_state, self.xtol).points

    def transform(self, U) -> np.ndarray:
        """Map an ``(n, 2)`` array of uniforms to pairs; massless slices raise."""
        check_is_fitted(self, "session_")
        return transform_uniforms(self.session_, _check_uniforms(U, 2), self.xtol)

    def pdf(self, x, y) -> np.ndarray:
        """Normalized approximant ``f~(x, y) / mass``."""
        check_is_fitted(self, "session_")
        return self.lowrank_(x, y) / self.total_mass_

    def marginal_cdf(self, x) -> np.ndarray:
        check_is_fitted(self, "session_")
        return self.session_.marginal_cdf(x)

    def conditional_cdf(self, x0: float, y) -> np.ndarray:
        """CDF of ``Y`` given ``X = x0`` at ``y``."""
        check_is_fitted(self, "session_")
        return clenshaw_eval(conditional_cdf_at(self.session_, x0).F, y)


class RejectionSampler(BaseEstimator):
    """Accept/reject under a constant hat, in one or two variables.

    Parameters
    ----------
    hat_height : float or None, default=None
        Envelope height. ``None`` uses the maximum of a Chebyshev (1D) or
        low-rank (2D) approximant, inflated by a relative ``1e-10``.
    max_proposals : int, default=10**9

    Attributes
    ----------
    hat_height_ : float
    ndim_ : int
    stats_ : RejectionStats
        Counters of the most recent ``sample`` call.
    """

    def __init__(self, hat_height: float | None = None, max_proposals: int = MAX_PROPOSALS):
        self.hat_height = hat_height
        self.max_proposals = max_proposals

    def fit(self, density, bounds):
        """Fit on ``(a, b)`` for a univariate or ``((a, b), (c, d))`` for a bivariate density."""
        two_d = isinstance(bounds, Domain2D) or np.ndim(bounds[0]) > 0
        f = _density(density, 2 if two_d else 1)
        self.density_ = f
        self.ndim_ = f.arity
        self.bounds_ = as_domain(bounds) if two_d else as_interval(bounds)
        if self.hat_height is not None:
            self.hat_height_ = float(self.hat_height)
        elif f.arity == 1:
            self.hat_height_ = default_hat_1d(f, self.bounds_)
        else:
            self.hat_height_ = default_hat_2d(aca_approximate(f, self.bounds_))
        return self

    def sample(self, n_samples: int = 1, random_state=None) -> np.ndarray:
        check_is_fitted(self, "hat_height_")
        run = rejection_sample_1d if self.ndim_ == 1 else rejection_sample_2d
        batch, self.stats_ = run(self.density_, self.bounds_, _check_n(n_samples), self.hat_height_,
                                 random_state, self.max_proposals)
        return batch.points
