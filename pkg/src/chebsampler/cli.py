"""Command-line front end.

Exit codes: 0 success, 2 bad input (expression, flags, CSV), 3 numerical
or construction failure, 4 goodness-of-fit gate failure (``bench`` only).
"""

from __future__ import annotations

import argparse
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .bench import evalcount, evalcount_csv, fitted_slope, format_table, histogram, records_to_csv, run_suite
from .chebyshev import DEFAULT_TOL
from .errors import ExpressionError, SamplingError
from .expr import compile_expr, parse
from .lowrank import DEFAULT_TOL_2D
from .rejection import default_hat_1d, default_hat_2d, rejection_sample_1d, rejection_sample_2d
from .rng import UniformSource, format_csv, read_csv
from .sampler1d import cdf_from_density, sample_1d_from_cdf
from .sampler2d import build_session, sample_2d
from .suite import select

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_GATE = 0, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def _seed(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer: {text}")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _nonneg_int(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="chebsampler", description="Sample from black-box densities in 1D and 2D "
                "by inverse transform sampling on Chebyshev approximants.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def density_flags(sp):
        sp.add_argument("--expr", required=True, help="density expression in x (and y)")
        sp.add_argument("--x", nargs=2, type=float, required=True, metavar=("A", "B"))
        sp.add_argument("--y", nargs=2, type=float, metavar=("C", "D"))
        sp.add_argument("--tol", type=float, default=None,
                        help=f"approximation tolerance (default {DEFAULT_TOL:.3g} in 1D, "
                             f"{DEFAULT_TOL_2D:g} in 2D)")

    s = sub.add_parser("sample", help="draw samples and write them as CSV")
    density_flags(s)
    s.add_argument("-n", "--num", type=_nonneg_int, required=True)
    s.add_argument("--seed", type=_seed, default=None)
    s.add_argument("--method", choices=("its", "rs"), default="its")
    s.add_argument("--jobs", type=_positive_int, default=1,
                   help="shard sampling over J threads by seed partitioning")
    s.add_argument("--out", default=None, help="output CSV (default: standard output)")

    b = sub.add_parser("bench", help="run ITS and RS on the benchmark densities")
    b.add_argument("suite", nargs="?", default="all", help="1d, 2d, all, or comma-separated names")
    b.add_argument("-n", "--num", type=_positive_int, default=10_000)
    b.add_argument("--seed", type=_seed, default=0)
    b.add_argument("--method", choices=("its", "rs", "both"), default="both")
    b.add_argument("--alpha", type=float, default=1e-3)
    b.add_argument("--out", default=None, help="also write the records as CSV")

    e = sub.add_parser("evalcount", help="density evaluations of ITS and RS versus N")
    density_flags(e)
    e.add_argument("--ns", nargs="+", type=_positive_int, default=[10, 50, 100, 1000])
    e.add_argument("--seed", type=_seed, default=0)
    e.add_argument("--hat", type=float, default=None, help="RS hat height (default: max of f)")
    e.add_argument("--out", default=None)

    h = sub.add_parser("hist", help="histogram of a samples CSV")
    h.add_argument("csv", help="samples CSV as written by 'sample'")
    h.add_argument("--bins", type=_positive_int, default=50)
    h.add_argument("--column", choices=("x", "y"), default="x")
    h.add_argument("--x", nargs=2, type=float, metavar=("A", "B"), help="histogram range")
    h.add_argument("--expr", default=None, help="overlay this density (normalized on the range)")
    h.add_argument("--format", choices=("csv", "svg"), default=None,
                   help="output format (default: from --out suffix, else csv)")
    h.add_argument("--out", default=None)
    return p


def _bounds(args, arity):
    if arity == 2:
        if args.y is None:
            raise _UsageError("expression uses y; pass --y C D")
        return (tuple(args.x), tuple(args.y))
    return tuple(args.x)


def _emit(text: str, path: str | None):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _shard_sizes(n: int, jobs: int):
    return [n // jobs + (j < n % jobs) for j in range(jobs)]


def cmd_sample(args, log) -> int:
    f = compile_expr(args.expr)
    bounds = _bounds(args, f.arity)
    master = UniformSource(args.seed)
    sources = [master] if args.jobs == 1 else master.spawn(args.jobs)
    sizes = _shard_sizes(args.num, len(sources))
    t0 = time.perf_counter()
    if args.method == "its":
        if f.arity == 1:
            cdf = cdf_from_density(f, bounds, DEFAULT_TOL if args.tol is None else args.tol)
            log(f"degree={cdf.density.degree} total_mass={cdf.total_mass!r} evals={f.eval_count}")
            draw = lambda src, m: sample_1d_from_cdf(cdf, m, src).points  # noqa: E731
        else:
            session = build_session(f, bounds, DEFAULT_TOL_2D if args.tol is None else args.tol)
            lr = session.lr
            log(f"rank={lr.rank} row_degree={max(r.degree for r in lr.rows)} "
                f"col_degree={max(c.degree for c in lr.cols)} total_mass={session.total_mass!r} "
                f"evals={f.eval_count}")
            draw = lambda src, m: sample_2d(session, m, src).points  # noqa: E731
    else:
        if f.arity == 1:
            hat = default_hat_1d(compile_expr(args.expr), bounds)
            draw = lambda src, m: rejection_sample_1d(f, bounds, m, hat, src)[0].points  # noqa: E731
        else:
            session = build_session(compile_expr(args.expr), bounds,
                                    DEFAULT_TOL_2D if args.tol is None else args.tol)
            hat = default_hat_2d(session.lr)
            draw = lambda src, m: rejection_sample_2d(f, bounds, m, hat, src)[0].points  # noqa: E731
        log(f"hat={hat!r}")
    t1 = time.perf_counter()
    if len(sources) == 1:
        parts = [draw(sources[0], sizes[0])]
    else:
        with ThreadPoolExecutor(max_workers=len(sources)) as pool:
            parts = list(pool.map(draw, sources, sizes))
    points = np.concatenate(parts) if parts else np.empty(0)
    t2 = time.perf_counter()
    if args.method == "rs":
        log(f"evals={f.eval_count}")
    log(f"construct_s={t1 - t0:.4g} sample_s={t2 - t1:.4g} n={args.num} seed={master.seed} "
        f"jobs={len(sources)}")
    _emit(format_csv(points, master.seed), args.out)
    return EXIT_OK


def cmd_bench(args, log) -> int:
    entries = select(args.suite)
    methods = {"its": ("ITS",), "rs": ("RS",), "both": ("ITS", "RS")}[args.method]
    records = run_suite(entries, args.num, args.seed, alpha=args.alpha, methods=methods)
    print(format_table(records))
    if args.out:
        _emit(records_to_csv(records), args.out)
    if any(r.error for r in records):
        return EXIT_NUMERIC
    if not all(r.gof_pass for r in records):
        return EXIT_GATE
    return EXIT_OK


def cmd_evalcount(args, log) -> int:
    node = parse(args.expr)
    bounds = _bounds(args, node.arity)
    tol = args.tol
    rows, slope = evalcount(lambda: compile_expr(node, args.expr), bounds, args.ns, args.seed,
                            tol=tol, hat_height=args.hat)
    text = evalcount_csv(rows)
    _emit(text, args.out)
    msg = f"expected RS evals per sample {slope:.6g}"
    if len(rows) >= 2:
        msg += f", fitted {fitted_slope(rows):.6g}"
    log(msg)
    return EXIT_OK


def cmd_hist(args, log) -> int:
    try:
        batch = read_csv(args.csv)
    except (OSError, ValueError) as exc:
        raise _UsageError(f"cannot read {args.csv}: {exc}") from exc
    pts = batch.points
    if pts.ndim == 2:
        pts = pts[:, 0 if args.column == "x" else 1]
    elif args.column == "y":
        raise _UsageError("CSV has no y column")
    density = None
    if args.expr is not None:
        density = compile_expr(args.expr)
        if density.arity != 1:
            raise _UsageError("overlay density must be a function of x only")
        if args.x is None:
            raise _UsageError("--expr overlay needs the range --x A B")
    try:
        hist = histogram(pts, args.bins, args.x, density)
    except ValueError as exc:
        raise _UsageError(str(exc)) from exc
    fmt = args.format or ("svg" if args.out and args.out.lower().endswith(".svg") else "csv")
    _emit(hist.to_svg() if fmt == "svg" else hist.to_csv(), args.out)
    return EXIT_OK


COMMANDS = {"sample": cmd_sample, "bench": cmd_bench, "evalcount": cmd_evalcount, "hist": cmd_hist}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        # summaries go to stdout unless stdout carries the data
        to_stderr = getattr(args, "out", None) is None and args.command != "bench"
        stream = sys.stderr if to_stderr else sys.stdout

        def log(msg):
            print(msg, file=stream)

        return COMMANDS[args.command](args, log)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ExpressionError as exc:
        print(f"error: {exc.code}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SamplingError as exc:
        print(f"error: {exc.code}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
