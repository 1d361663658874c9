"""Rejection sampling under a constant (rectangular) hat.

Used as the baseline: every proposal costs one density evaluation, so the
expected evaluations per accepted sample are ``hat * area / mass``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .chebyshev import DEFAULT_TOL, build_approximant, chebyshev_points, max_abs_on_grid
from .density import as_density, as_domain, as_interval
from .errors import HatViolationError, RunawayError
from .rng import SampleBatch, as_uniform_source

MAX_PROPOSALS = 10 ** 9
HAT_SLACK = 1e-12
HAT_INFLATION = 1e-10
_MIN_BATCH = 256
_MAX_BATCH = 2 ** 20
_EVAL_CHUNK = 256


@dataclass
class RejectionStats:
    proposals: int = 0
    accepted: int = 0
    density_evals: int = 0

    @property
    def acceptance_ratio(self) -> float:
        return self.accepted / self.proposals if self.proposals else math.nan

    def as_row(self) -> dict:
        return {"proposals": self.proposals, "accepted": self.accepted,
                "density_evals": self.density_evals}

    def to_csv(self) -> str:
        return "proposals,accepted,density_evals\n" \
               f"{self.proposals},{self.accepted},{self.density_evals}\n"


def default_hat_1d(f, iv, tol: float = DEFAULT_TOL, oversample: int = 10) -> float:
    """Maximum of a Chebyshev approximant of ``f``, inflated slightly."""
    _, peak = max_abs_on_grid(build_approximant(f, iv, tol), oversample)
    return peak * (1.0 + HAT_INFLATION)


def default_hat_2d(lr, oversample: int = 4) -> float:
    """Maximum of a low-rank approximant, refined locally and inflated slightly."""
    dom = lr.domain
    m = max(max(r.degree for r in lr.rows), 16)
    n = max(max(c.degree for c in lr.cols), 16)
    xs = chebyshev_points(min(oversample * m, 4096), dom.x)
    ys = chebyshev_points(min(oversample * n, 4096), dom.y)
    vals = np.abs(lr.on_grid(xs, ys))
    i, j = np.unravel_index(int(np.argmax(vals)), vals.shape)
    best = float(vals[i, j])
    res = optimize.minimize(lambda p: -abs(lr(p[0], p[1])), [xs[i], ys[j]], method="Nelder-Mead",
                            bounds=[(dom.x.a, dom.x.b), (dom.y.a, dom.y.b)],
                            options={"xatol": 1e-13, "fatol": 1e-16 * max(best, 1.0)})
    best = max(best, -float(res.fun))
    return best * (1.0 + HAT_INFLATION)


def _run(propose, f_eval, n, hat, rng, max_proposals, ndim):
    if n < 0:
        raise ValueError(f"sample count must be >= 0, got {n}")
    if not hat > 0 or not math.isfinite(hat):
        raise ValueError(f"hat height must be positive and finite, got {hat}")
    stats = RejectionStats()
    chunks = []
    rate = 0.5
    while stats.accepted < n:
        need = n - stats.accepted
        batch = int(min(_MAX_BATCH, max(_MIN_BATCH, math.ceil(need / rate))))
        if stats.proposals + batch > max_proposals:
            batch = max_proposals - stats.proposals
            if batch <= 0:
                raise RunawayError(f"no {n} acceptances within {max_proposals} proposals "
                                   f"({stats.accepted} accepted)")
        pts = propose(batch)
        u = rng.random(batch)
        # evaluate slice by slice so that at most one slice is wasted past the n-th acceptance
        for s in range(0, batch, _EVAL_CHUNK):
            sl = slice(s, min(s + _EVAL_CHUNK, batch))
            vals = f_eval(pts[sl])
            stats.density_evals += vals.shape[0]
            over = np.flatnonzero(vals > hat * (1.0 + HAT_SLACK))
            if over.size:
                j = sl.start + over[0]
                raise HatViolationError(f"density {float(vals[over[0]])!r} exceeds hat {hat!r} at {np.asarray(pts[j]).tolist()!r}",
                                        x=pts[j], value=float(vals[over[0]]))
            acc = np.flatnonzero(u[sl] * hat <= vals)
            if acc.size >= need:
                stats.proposals += int(acc[need - 1]) + 1
                acc = acc[:need]
            else:
                stats.proposals += vals.shape[0]
            stats.accepted += acc.size
            need -= acc.size
            chunks.append(pts[sl][acc])
            if need == 0:
                break
        rate = max(stats.accepted / stats.proposals, 1.0 / _MAX_BATCH)
    shape = (0,) if ndim == 1 else (0, 2)
    points = np.concatenate(chunks) if chunks else np.empty(shape)
    return SampleBatch(points, rng.seed), stats


def rejection_sample_1d(f, iv, n: int, hat_height: float, random_state=None,
                        max_proposals: int = MAX_PROPOSALS):
    """Accept/reject with proposals uniform on ``iv``.

    Proposals are drawn in batches; ``density_evals`` counts every
    evaluation made, ``proposals`` only those up to the ``n``-th
    acceptance.

    Returns
    -------
    batch : SampleBatch
    stats : RejectionStats

    Raises
    ------
    HatViolationError
        If ``f`` is seen above ``hat_height * (1 + 1e-12)``.
    RunawayError
        If ``max_proposals`` proposals do not yield ``n`` acceptances.
    """
    f = as_density(f, 1)
    iv = as_interval(iv)
    rng = as_uniform_source(random_state)
    propose = lambda m: iv.a + iv.width * rng.random(m)  # noqa: E731
    return _run(propose, f, n, float(hat_height), rng, max_proposals, 1)


def rejection_sample_2d(f, dom, n: int, hat_height: float, random_state=None,
                        max_proposals: int = MAX_PROPOSALS):
    """Two-dimensional analogue of :func:`rejection_sample_1d` on a rectangle."""
    f = as_density(f, 2)
    dom = as_domain(dom)
    rng = as_uniform_source(random_state)

    def propose(m):
        xy = rng.random((m, 2))
        xy[:, 0] = dom.x.a + dom.x.width * xy[:, 0]
        xy[:, 1] = dom.y.a + dom.y.width * xy[:, 1]
        return xy

    return _run(propose, lambda p: f(p[:, 0], p[:, 1]), n, float(hat_height), rng,
                max_proposals, 2)
