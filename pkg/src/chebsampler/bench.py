"""Benchmark harness: timing, evaluation counts, goodness of fit, histograms.

Construction and sampling are timed separately with ``perf_counter``.
Oracles used for the goodness-of-fit verdicts are built outside the timed
regions and evaluate the density through an uncounted callable.
"""

from __future__ import annotations

import io
import time
from dataclasses import dataclass

import numpy as np

from .chebyshev import DEFAULT_TOL
from .density import DensityFn, as_density, as_domain, as_interval
from .errors import SamplingError
from .gof import DEFAULT_ALPHA, QuadratureCdf, chi_square_test, ks_test, tensor_cell_masses
from .lowrank import DEFAULT_TOL_2D, aca_approximate
from .rejection import default_hat_1d, default_hat_2d, rejection_sample_1d, rejection_sample_2d
from .sampler1d import DEFAULT_XTOL, cdf_from_density, sample_1d_from_cdf
from .sampler2d import build_session, sample_2d

BENCH_HEADER = "density,method,n,construct_s,sample_s,total_s,evals,rank,gof_stat,gof_pass"
CHI_BINS = 20


@dataclass
class BenchRecord:
    """One (density, method) row.

    ``gof_stat`` is the KS distance in 1D and the chi-square p-value in 2D.
    ``rank`` is only set for the 2D inverse transform sampler. When the
    run failed, ``error`` holds the error code and the numeric fields are
    ``None``.
    """

    density: str
    method: str
    n: int
    construct_s: float | None = None
    sample_s: float | None = None
    evals: int | None = None
    rank: int | None = None
    gof_stat: float | None = None
    gof_pass: bool | None = None
    error: str | None = None

    @property
    def total_s(self) -> float | None:
        if self.construct_s is None or self.sample_s is None:
            return None
        return self.construct_s + self.sample_s

    def csv_row(self) -> str:
        def cell(v, fmt="{:.6g}"):
            return "" if v is None else fmt.format(v)
        verdict = f"ERROR:{self.error}" if self.error else cell(self.gof_pass, "{}").lower()
        return ",".join([self.density, self.method, str(self.n), cell(self.construct_s),
                         cell(self.sample_s), cell(self.total_s), cell(self.evals, "{}"),
                         cell(self.rank, "{}"), cell(self.gof_stat), verdict])


def records_to_csv(records) -> str:
    return "\n".join([BENCH_HEADER] + [r.csv_row() for r in records]) + "\n"


def format_table(records) -> str:
    """Fixed-width console rendering of bench records."""
    cols = BENCH_HEADER.split(",")
    rows = [r.csv_row().split(",") for r in records]
    widths = [max(len(c), *(len(r[i]) for r in rows)) if rows else len(c)
              for i, c in enumerate(cols)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(cols, widths))]
    lines += ["  ".join(v.ljust(w) for v, w in zip(r, widths)) for r in rows]
    return "\n".join(lines)


def _gof(entry, points, alpha, oracle_cache):
    if entry.ndim == 1:
        if entry.name not in oracle_cache:
            a, b = entry.bounds
            oracle_cache[entry.name] = QuadratureCdf(entry.plain(), a, b)
        rep = ks_test(points, oracle_cache[entry.name], alpha)
        return rep.statistic, rep.passed
    (a, b), (c, d) = entry.bounds
    xe = np.linspace(a, b, CHI_BINS + 1)
    ye = np.linspace(c, d, CHI_BINS + 1)
    if entry.name not in oracle_cache:
        oracle_cache[entry.name] = tensor_cell_masses(entry.plain(), xe, ye)
    counts, _, _ = np.histogram2d(points[:, 0], points[:, 1], bins=[xe, ye])
    rep = chi_square_test(counts, oracle_cache[entry.name], alpha)
    return rep.p_value, rep.passed


def run_its(entry, n: int, seed: int, *, alpha: float = DEFAULT_ALPHA, tol: float | None = None,
            oracle_cache: dict | None = None):
    """Inverse transform sampling of one suite entry.

    Returns the record and, in 2D, the low-rank approximant (so the
    rejection baseline can reuse it for its hat), else ``None``.
    """
    cache = {} if oracle_cache is None else oracle_cache
    rec = BenchRecord(entry.name, "ITS", n)
    f = entry.density()
    lr = None
    try:
        t0 = time.perf_counter()
        if entry.ndim == 1:
            cdf = cdf_from_density(f, entry.bounds, DEFAULT_TOL if tol is None else tol)
            t1 = time.perf_counter()
            pts = sample_1d_from_cdf(cdf, n, seed).points
        else:
            session = build_session(f, entry.bounds, DEFAULT_TOL_2D if tol is None else tol)
            lr = session.lr
            rec.rank = session.rank
            t1 = time.perf_counter()
            pts = sample_2d(session, n, seed).points
        t2 = time.perf_counter()
    except SamplingError as exc:
        rec.error = exc.code
        return rec, lr
    rec.construct_s, rec.sample_s, rec.evals = t1 - t0, t2 - t1, f.eval_count
    rec.gof_stat, rec.gof_pass = _gof(entry, pts, alpha, cache)
    return rec, lr


def run_rs(entry, n: int, seed: int, *, alpha: float = DEFAULT_ALPHA, lr=None,
           oracle_cache: dict | None = None) -> BenchRecord:
    """Rejection sampling under a constant hat at the density's maximum.

    The hat search is timed as construction but its evaluations are not
    counted; ``evals`` covers the accept/reject loop only.
    """
    cache = {} if oracle_cache is None else oracle_cache
    rec = BenchRecord(entry.name, "RS", n)
    f = entry.density()
    try:
        t0 = time.perf_counter()
        if entry.ndim == 1:
            hat = default_hat_1d(as_density(entry.plain(), 1), entry.bounds)
            t1 = time.perf_counter()
            pts, stats = rejection_sample_1d(f, entry.bounds, n, hat, seed)
        else:
            if lr is None:
                lr = aca_approximate(as_density(entry.plain(), 2), entry.bounds)
            hat = default_hat_2d(lr)
            t1 = time.perf_counter()
            pts, stats = rejection_sample_2d(f, entry.bounds, n, hat, seed)
        t2 = time.perf_counter()
    except SamplingError as exc:
        rec.error = exc.code
        return rec
    rec.construct_s, rec.sample_s, rec.evals = t1 - t0, t2 - t1, stats.density_evals
    rec.gof_stat, rec.gof_pass = _gof(entry, pts.points, alpha, cache)
    return rec


def run_suite(entries, n: int = 10_000, seed: int = 0, *, alpha: float = DEFAULT_ALPHA,
              methods=("ITS", "RS"), progress=None) -> list[BenchRecord]:
    """ITS and RS on every entry; a failure is recorded and the suite continues."""
    records = []
    for entry in entries:
        cache: dict = {}
        lr = None
        if "ITS" in methods:
            rec, lr = run_its(entry, n, seed, alpha=alpha, oracle_cache=cache)
            records.append(rec)
            if progress:
                progress(rec)
        if "RS" in methods:
            rec = run_rs(entry, n, seed, alpha=alpha, lr=lr, oracle_cache=cache)
            records.append(rec)
            if progress:
                progress(rec)
    return records


@dataclass(frozen=True)
class EvalCountRow:
    n: int
    evals_its: int
    evals_rs: int


def evalcount(density_factory, bounds, ns, seed: int = 0, *, tol: float | None = None,
              hat_height: float | None = None):
    """Density evaluations spent by ITS and RS to draw ``N`` samples, per ``N``.

    ``density_factory()`` must return a fresh :class:`DensityFn` each call.
    Every ``N`` rebuilds the ITS approximant from scratch, so equal counts
    across ``N`` show that sampling itself costs no evaluations.

    Returns
    -------
    rows : list of EvalCountRow
    expected_slope : float
        ``hat * area / mass``, the mean RS evaluations per accepted sample.
    """
    probe = density_factory()
    two_d = probe.arity == 2
    rows = []
    mass = hat = area = None
    for n in ns:
        f = density_factory()
        if two_d:
            session = build_session(f, bounds, DEFAULT_TOL_2D if tol is None else tol)
            sample_2d(session, n, seed)
            if hat is None:
                hat = hat_height if hat_height is not None else default_hat_2d(session.lr)
                mass, area = session.total_mass, as_domain(bounds).area
        else:
            cdf = cdf_from_density(f, bounds, DEFAULT_TOL if tol is None else tol)
            sample_1d_from_cdf(cdf, n, seed)
            if hat is None:
                hat = hat_height if hat_height is not None else default_hat_1d(density_factory(), bounds)
                mass, area = cdf.total_mass, as_interval(bounds).width
        its = f.eval_count
        g = density_factory()
        if two_d:
            _, stats = rejection_sample_2d(g, bounds, n, hat, seed)
        else:
            _, stats = rejection_sample_1d(g, bounds, n, hat, seed)
        rows.append(EvalCountRow(int(n), its, stats.density_evals))
    return rows, hat * area / mass


def evalcount_csv(rows) -> str:
    return "N,evals_ITS,evals_RS\n" + "".join(f"{r.n},{r.evals_its},{r.evals_rs}\n" for r in rows)


def fitted_slope(rows) -> float:
    """Least-squares slope of RS evaluations against ``N``."""
    n = np.array([r.n for r in rows], dtype=float)
    e = np.array([r.evals_rs for r in rows], dtype=float)
    return float(np.polyfit(n, e, 1)[0])


@dataclass(frozen=True)
class Histogram:
    """Equal-width bin counts with an optional density overlay.

    ``pdf`` is the normalized density at the bin centers and ``expected``
    the expected count per bin (``n`` times the exact bin probability).
    """

    edges: np.ndarray
    counts: np.ndarray
    pdf: np.ndarray | None = None
    expected: np.ndarray | None = None

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    def to_csv(self) -> str:
        out = io.StringIO()
        overlay = self.pdf is not None
        out.write("left,right,count" + (",pdf,expected\n" if overlay else "\n"))
        for i, c in enumerate(self.counts):
            row = f"{float(self.edges[i])!r},{float(self.edges[i + 1])!r},{int(c)}"
            if overlay:
                row += f",{float(self.pdf[i])!r},{float(self.expected[i])!r}"
            out.write(row + "\n")
        return out.getvalue()

    def to_svg(self, width: int = 640, height: int = 400, margin: int = 40) -> str:
        """Bar chart with the density curve, scaled to counts, as a polyline."""
        widths = np.diff(self.edges)
        curve = None if self.pdf is None else self.n * widths * self.pdf
        top = float(max(self.counts.max(), 0 if curve is None else curve.max(), 1))
        lo, hi = float(self.edges[0]), float(self.edges[-1])
        span = hi - lo if hi > lo else 1.0
        sx = lambda v: margin + (v - lo) / span * (width - 2 * margin)  # noqa: E731
        sy = lambda v: height - margin - v / top * (height - 2 * margin)  # noqa: E731
        parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
                 f'viewBox="0 0 {width} {height}">',
                 f'<rect width="{width}" height="{height}" fill="white"/>']
        for i, c in enumerate(self.counts):
            x0, x1 = sx(self.edges[i]), sx(self.edges[i + 1])
            y = sy(c)
            parts.append(f'<rect x="{x0:.2f}" y="{y:.2f}" width="{max(x1 - x0, 0.5):.2f}" '
                         f'height="{height - margin - y:.2f}" fill="steelblue" stroke="white" '
                         f'stroke-width="0.5"/>')
        if curve is not None:
            mids = 0.5 * (self.edges[:-1] + self.edges[1:])
            pts = " ".join(f"{sx(m):.2f},{sy(e):.2f}" for m, e in zip(mids, curve))
            parts.append(f'<polyline points="{pts}" fill="none" stroke="crimson" stroke-width="1.5"/>')
        base = height - margin
        parts.append(f'<line x1="{margin}" y1="{base}" x2="{width - margin}" y2="{base}" stroke="black"/>')
        parts.append(f'<text x="{margin}" y="{height - 10}" font-size="12">{lo:.4g}</text>')
        parts.append(f'<text x="{width - margin}" y="{height - 10}" font-size="12" '
                     f'text-anchor="end">{hi:.4g}</text>')
        parts.append(f'<text x="{margin}" y="{margin - 10}" font-size="12">max count {top:.6g}</text>')
        parts.append("</svg>")
        return "\n".join(parts) + "\n"


def histogram(samples, bins: int = 50, bounds=None, density=None, tol: float = DEFAULT_TOL) -> Histogram:
    """Bin ``samples`` into ``bins`` equal-width cells.

    Parameters
    ----------
    samples : array_like, shape (n,)
    bins : int
    bounds : (float, float), optional
        Histogram range; the sample range by default.
    density : callable, optional
        Unnormalized density of one variable. It is normalized on the
        histogram range through its Chebyshev CDF.

    Raises
    ------
    ValueError
        On empty input or a nonpositive bin count.
    """
    x = np.asarray(samples, dtype=float).ravel()
    if x.size == 0:
        raise ValueError("no samples to histogram")
    if bins < 1:
        raise ValueError(f"bins must be >= 1, got {bins}")
    lo, hi = (float(x.min()), float(x.max())) if bounds is None else map(float, bounds)
    if hi <= lo:
        hi = lo + 1.0
    counts, edges = np.histogram(x, bins=bins, range=(lo, hi))
    if density is None:
        return Histogram(edges, counts)
    cdf = cdf_from_density(density if isinstance(density, DensityFn) else as_density(density, 1),
                           (lo, hi), tol)
    mids = 0.5 * (edges[:-1] + edges[1:])
    F = np.clip(cdf(edges), 0.0, 1.0)
    return Histogram(edges, counts, cdf.pdf(mids), x.size * np.diff(F))


def scaling_ratio(cdf_or_session, n_small: int = 10_000, n_large: int = 100_000, seed: int = 0,
                  xtol: float = DEFAULT_XTOL, repeats: int = 3) -> float:
    """Best-of-``repeats`` sampling time at ``n_large`` over that at ``n_small``."""
    def draw(n):
        if hasattr(cdf_or_session, "lr"):
            return sample_2d(cdf_or_session, n, seed, xtol)
        return sample_1d_from_cdf(cdf_or_session, n, seed, xtol)

    def best(n):
        times = []
        for _ in range(repeats):
            t0 = time.perf_counter()
            draw(n)
            times.append(time.perf_counter() - t0)
        return min(times)

    draw(min(n_small, 1000))
    return best(n_large) / best(n_small)


__all__ = [
    "BENCH_HEADER", "BenchRecord", "EvalCountRow", "Histogram", "evalcount", "evalcount_csv",
    "fitted_slope", "format_table", "histogram", "records_to_csv", "run_its", "run_rs",
    "run_suite", "scaling_ratio",
]
