"""Goodness-of-fit gates and quadrature reference distributions.

The reference CDFs and cell masses here are computed directly from the
density by quadrature and share no code with the Chebyshev machinery, so
they can serve as independent oracles for the samplers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, interpolate, special, stats

DEFAULT_ALPHA = 1e-3


@dataclass(frozen=True)
class GofReport:
    """Outcome of one goodness-of-fit test.

    For ``kind == "KS"`` the verdict is ``statistic < critical``; for
    ``"chi-square"`` it is ``p_value >= alpha``.
    """

    kind: str
    statistic: float
    alpha: float
    critical: float | None = None
    p_value: float | None = None

    @property
    def passed(self) -> bool:
        if self.kind == "chi-square":
            return self.p_value >= self.alpha
        return self.statistic < self.critical

    def __str__(self):
        verdict = "pass" if self.passed else "FAIL"
        if self.kind == "chi-square":
            return f"{self.kind}: stat={self.statistic:.4g} p={self.p_value:.4g} ({verdict})"
        return f"{self.kind}: D={self.statistic:.4g} crit={self.critical:.4g} ({verdict})"


def ks_critical(n: int, alpha: float = DEFAULT_ALPHA) -> float:
    """Asymptotic one-sample KS critical value, ``K^{-1}(alpha) / sqrt(n)``."""
    return float(special.kolmogi(alpha) / math.sqrt(n))


def ks_statistic(samples, cdf) -> float:
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    F = np.asarray(cdf(x), dtype=float)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - F), np.max(F - (i - 1) / n)))


def ks_test(samples, cdf, alpha: float = DEFAULT_ALPHA) -> GofReport:
    n = len(samples)
    return GofReport("KS", ks_statistic(samples, cdf), alpha, critical=ks_critical(n, alpha))


def ks_2samp_test(a, b, alpha: float = DEFAULT_ALPHA) -> GofReport:
    res = stats.ks_2samp(a, b)
    n, m = len(a), len(b)
    crit = float(special.kolmogi(alpha) * math.sqrt((n + m) / (n * m)))
    return GofReport("KS-2samp", float(res.statistic), alpha, critical=crit, p_value=float(res.pvalue))


def chi_square_test(observed, expected_prob, alpha: float = DEFAULT_ALPHA,
                    min_prob: float = 1e-6) -> GofReport:
    """Pearson test; cells with probability below ``min_prob`` are pooled."""
    obs = np.asarray(observed, dtype=float).ravel()
    p = np.asarray(expected_prob, dtype=float).ravel()
    p = np.clip(p, 0.0, None)
    p = p / p.sum()
    small = p < min_prob
    if small.any():
        obs = np.append(obs[~small], obs[small].sum())
        p = np.append(p[~small], p[small].sum())
        if p[-1] == 0.0:
            if obs[-1] > 0:
                return GofReport("chi-square", math.inf, alpha, p_value=0.0)
            obs, p = obs[:-1], p[:-1]
    n = obs.sum()
    expected = n * p
    stat = float(np.sum((obs - expected) ** 2 / expected))
    dof = obs.size - 1
    return GofReport("chi-square", stat, alpha, p_value=float(stats.chi2.sf(stat, dof)))


def clenshaw_curtis(n: int, a: float = -1.0, b: float = 1.0):
    """Nodes and weights of the ``(n+1)``-point Clenshaw-Curtis rule on ``[a, b]``.

    Weights come from the closed-form cosine sums (Waldvogel's explicit
    formula), evaluated directly.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    theta = np.pi * np.arange(n + 1) / n
    x = np.cos(theta)
    w = np.zeros(n + 1)
    v = np.ones(n - 1)
    inner = slice(1, n)
    if n % 2 == 0:
        w[0] = w[n] = 1.0 / (n * n - 1)
        for k in range(1, n // 2):
            v -= 2.0 * np.cos(2 * k * theta[inner]) / (4 * k * k - 1)
        v -= np.cos(n * theta[inner]) / (n * n - 1)
    else:
        w[0] = w[n] = 1.0 / (n * n)
        for k in range(1, (n - 1) // 2 + 1):
            v -= 2.0 * np.cos(2 * k * theta[inner]) / (4 * k * k - 1)
    w[inner] = 2.0 * v / n
    half = 0.5 * (b - a)
    return 0.5 * (a + b) + half * x, half * w


class QuadratureCdf:
    """Reference CDF of an unnormalized density by adaptive quadrature.

    The interval is cut into ``cells`` equal pieces whose masses are found
    with :func:`scipy.integrate.quad`; inside a cell the CDF is completed
    with a fixed Gauss-Legendre rule on ``[left edge, x]``.

    Parameters
    ----------
    f : callable
        Vectorized density of one variable (plain function, not counted).
    a, b : float
    cells : int
    """

    def __init__(self, f, a: float, b: float, cells: int = 2048, order: int = 24):
        self.f = f
        self.a, self.b = float(a), float(b)
        self.edges = np.linspace(self.a, self.b, cells + 1)
        scalar = lambda t: float(f(np.array([t]))[0])  # noqa: E731
        masses = np.array([
            integrate.quad(scalar, lo, hi, epsabs=0.0, epsrel=1e-13, limit=200)[0]
            for lo, hi in zip(self.edges[:-1], self.edges[1:])
        ])
        self.cum = np.concatenate([[0.0], np.cumsum(masses)])
        self.total = float(self.cum[-1])
        self._gl_x, self._gl_w = np.polynomial.legendre.leggauss(order)

    def partial(self, x):
        """Unnormalized integral from ``a`` to ``x``."""
        x = np.clip(np.asarray(x, dtype=float), self.a, self.b)
        flat = x.ravel()
        j = np.clip(np.searchsorted(self.edges, flat, side="right") - 1, 0, self.edges.size - 2)
        lo = self.edges[j]
        half = 0.5 * (flat - lo)
        nodes = lo[:, None] + half[:, None] * (1.0 + self._gl_x[None, :])
        inside = (self.f(nodes) * self._gl_w[None, :]).sum(axis=1) * half
        return (self.cum[j] + inside).reshape(x.shape)

    def __call__(self, x):
        return self.partial(x) / self.total

    def mass_between(self, lo, hi):
        return (self.partial(hi) - self.partial(lo)) / self.total


class TabulatedCdf:
    """Reference CDF for densities that are costly to evaluate.

    The CDF is tabulated at ``cells + 1`` equispaced edges by a Gauss-Legendre
    rule per cell and interpolated by the cubic Hermite spline that also
    matches the density at the edges. Far cheaper per query than
    :class:`QuadratureCdf`, and accurate to well below KS resolution for
    densities resolved by the cell width.
    """

    def __init__(self, f, a: float, b: float, cells: int = 2048, order: int = 8):
        edges = np.linspace(float(a), float(b), cells + 1)
        gx, gw = np.polynomial.legendre.leggauss(order)
        half = 0.5 * np.diff(edges)
        nodes = (edges[:-1, None] + half[:, None] * (1.0 + gx[None, :])).ravel()
        masses = (f(nodes).reshape(cells, order) @ gw) * half
        cum = np.concatenate([[0.0], np.cumsum(masses)])
        self.total = float(cum[-1])
        self.a, self.b = edges[0], edges[-1]
        self._spline = interpolate.CubicHermiteSpline(edges, cum / self.total, f(edges) / self.total)

    def __call__(self, x):
        return self._spline(np.clip(np.asarray(x, dtype=float), self.a, self.b))


def tensor_cell_masses(f, xedges, yedges, order: int = 64):
    """Probability of each rectangle ``[x_i, x_{i+1}] x [y_j, y_{j+1}]``.

    Each cell is integrated with a tensor Clenshaw-Curtis rule of
    ``order + 1`` points per side; the result is normalized to sum to one.
    """
    nx, ny = len(xedges) - 1, len(yedges) - 1
    t, w = clenshaw_curtis(order, 0.0, 1.0)
    out = np.empty((nx, ny))
    for i in range(nx):
        x0, x1 = xedges[i], xedges[i + 1]
        xs = x0 + (x1 - x0) * t
        wx = (x1 - x0) * w
        for j in range(ny):
            y0, y1 = yedges[j], yedges[j + 1]
            ys = y0 + (y1 - y0) * t
            wy = (y1 - y0) * w
            vals = f(xs[:, None], ys[None, :])
            out[i, j] = wx @ vals @ wy
    return out / out.sum()


def marginal_density(f, c: float, d: float, order: int = 2048):
    """Vectorized ``x -> int_c^d f(x, y) dy`` by a high-order Clenshaw-Curtis rule."""
    ys, wy = clenshaw_curtis(order, c, d)

    def g(x):
        x = np.asarray(x, dtype=float)
        flat = x.ravel()
        out = np.empty(flat.size)
        step = max(1, 2 ** 20 // ys.size)
        for s in range(0, flat.size, step):
            out[s:s + step] = f(flat[s:s + step, None], ys[None, :]) @ wy
        return out.reshape(x.shape)

    return g
