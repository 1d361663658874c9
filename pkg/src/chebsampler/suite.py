"""The benchmark densities, each with the box it is sampled on."""

from __future__ import annotations

from dataclasses import dataclass

from .density import DensityFn
from .expr import compile_expr, parse


@dataclass(frozen=True)
class SuiteEntry:
    """One benchmark density.

    Attributes
    ----------
    name : str
        Short key used on the command line.
    expr : str
        Expression in the syntax of :mod:`chebsampler.expr`.
    bounds : tuple
        ``(a, b)`` in 1D, ``((a, b), (c, d))`` in 2D.
    reference_rank : int or None
        Reference numerical rank of the 2D densities.
    """

    name: str
    expr: str
    bounds: tuple
    reference_rank: int | None = None

    @property
    def ndim(self) -> int:
        return 1 if isinstance(self.bounds[0], (int, float)) else 2

    def density(self) -> DensityFn:
        """A fresh counted density (its evaluation counter starts at zero)."""
        return compile_expr(self.expr, label=self.name)

    def plain(self):
        """Uncounted vectorized callable, for oracles."""
        node = parse(self.expr)
        if self.ndim == 1:
            return lambda x: node.evaluate(x)
        return lambda x, y: node.evaluate(x, y)


SUITE_1D = (
    SuiteEntry("multimodal", "exp(-x^2/2)*(1+sin(3*x)^2)*(1+cos(5*x)^2)", (-8.0, 8.0)),
    SuiteEntry("gue4", "exp(-4*x^2)*(9+72*x^2-192*x^4+512*x^6)", (-4.0, 4.0)),
    SuiteEntry("oscillatory", "2+cos(100*x)", (-1.0, 1.0)),
    SuiteEntry("sech", "sech(200*x)", (-1.0, 1.0)),
)

SUITE_2D = (
    SuiteEntry("bimodal", "exp(-100*(x-1)^2)+exp(-100*(y+1)^2)*(1+cos(20*x))",
               ((-2.0, 2.0), (-2.0, 2.0)), 2),
    SuiteEntry("quartic", "exp(-x^4/2-y^4/2)*(x-y)^2", ((-7.0, 7.0), (-7.0, 7.0)), 3),
    SuiteEntry("sech2d", "exp(-x^2-2*y^2)*sech(10*x*y)", ((-5.0, 5.0), (-4.0, 4.0)), 16),
    SuiteEntry("butterfly", "exp(-x^2-2*y^2)*sech(10*x*y)*(x-y)^2",
               ((-3.0, 3.0), (-3.0, 3.0)), 51),
)

SUITE = {e.name: e for e in SUITE_1D + SUITE_2D}


def select(which: str) -> tuple:
    """Entries for ``"1d"``, ``"2d"``, ``"all"`` or a comma-separated list of names."""
    if which == "1d":
        return SUITE_1D
    if which == "2d":
        return SUITE_2D
    if which == "all":
        return SUITE_1D + SUITE_2D
    names = [s.strip() for s in which.split(",") if s.strip()]
    unknown = [s for s in names if s not in SUITE]
    if unknown or not names:
        raise ValueError(f"unknown suite selector {which!r}; choose 1d, 2d, all or names from "
                         f"{', '.join(SUITE)}")
    return tuple(SUITE[s] for s in names)
