"""Domains and the instrumented black-box density wrapper."""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import NonFiniteError


@dataclass(frozen=True)
class Interval:
    """Closed finite interval ``[a, b]`` with ``a < b``."""

    a: float
    b: float

    def __post_init__(self):
        a, b = float(self.a), float(self.b)
        if not (math.isfinite(a) and math.isfinite(b)):
            raise ValueError(f"interval endpoints must be finite, got [{a}, {b}]")
        if not a < b:
            raise ValueError(f"interval requires a < b, got [{a}, {b}]")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def width(self) -> float:
        return self.b - self.a

    @property
    def mid(self) -> float:
        return 0.5 * (self.a + self.b)

    def to_unit(self, x):
        """Map points of ``[a, b]`` affinely onto ``[-1, 1]``."""
        return (2.0 * np.asarray(x, dtype=float) - (self.a + self.b)) / (self.b - self.a)

    def from_unit(self, t):
        return self.mid + 0.5 * self.width * np.asarray(t, dtype=float)

    def __iter__(self):
        yield self.a
        yield self.b


@dataclass(frozen=True)
class Domain2D:
    """Rectangle ``[a, b] x [c, d]``."""

    x: Interval
    y: Interval

    @property
    def area(self) -> float:
        return self.x.width * self.y.width


def as_interval(bounds) -> Interval:
    if isinstance(bounds, Interval):
        return bounds
    try:
        a, b = bounds
    except (TypeError, ValueError):
        raise ValueError(f"expected a pair (a, b), got {bounds!r}") from None
    return Interval(a, b)


def as_domain(bounds) -> Domain2D:
    if isinstance(bounds, Domain2D):
        return bounds
    try:
        bx, by = bounds
    except (TypeError, ValueError):
        raise ValueError(f"expected ((a, b), (c, d)), got {bounds!r}") from None
    return Domain2D(as_interval(bx), as_interval(by))


class DensityFn:
    """Black-box density with a pointwise evaluation counter.

    Parameters
    ----------
    func : callable
        ``func(x)`` or ``func(x, y)``. When ``vectorized`` is true it must
        accept numpy arrays and broadcast like a ufunc; otherwise it is
        called once per point.
    arity : {1, 2}
    vectorized : bool, default=True
    thread_safe : bool, default=False
        Whether ``func`` may be called concurrently from several threads.

    Notes
    -----
    ``eval_count`` grows by exactly one per point evaluated, whichever
    calling convention is used. The counter is guarded by a lock.
    """

    def __init__(self, func: Callable, arity: int = 1, *, vectorized: bool = True,
                 thread_safe: bool = False, label: str | None = None):
        if arity not in (1, 2):
            raise ValueError(f"arity must be 1 or 2, got {arity}")
        self.func = func
        self.arity = arity
        self.vectorized = vectorized
        self.thread_safe = thread_safe
        self.label = label if label is not None else getattr(func, "__name__", "f")
        self._count = 0
        self._lock = threading.Lock()

    @property
    def eval_count(self) -> int:
        return self._count

    def reset_count(self) -> None:
        with self._lock:
            self._count = 0

    def _bump(self, n: int) -> None:
        with self._lock:
            self._count += n

    def __call__(self, *args):
        if len(args) != self.arity:
            raise TypeError(f"density of arity {self.arity} called with {len(args)} arguments")
        arrays = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in args))
        shape = arrays[0].shape
        self._bump(int(np.prod(shape, dtype=np.int64)))
        if self.vectorized:
            out = np.asarray(self.func(*arrays), dtype=float)
            if out.shape != shape:
                out = np.broadcast_to(out, shape).copy()
            return out
        flat = [a.ravel() for a in arrays]
        out = np.fromiter((self.func(*p) for p in zip(*flat)), dtype=float, count=flat[0].size)
        return out.reshape(shape)

    def sample_checked(self, *args):
        """Evaluate and raise :class:`NonFiniteError` on NaN or Inf."""
        values = self(*args)
        bad = ~np.isfinite(values)
        if bad.any():
            idx = np.flatnonzero(bad.ravel())[0]
            where = tuple(float(np.broadcast_arrays(*args)[i].ravel()[idx]) for i in range(self.arity))
            raise NonFiniteError(f"density is not finite at {where}: {float(values.ravel()[idx])}",
                                 x=where if self.arity == 2 else where[0])
        return values

    def __repr__(self):
        return f"DensityFn({self.label!r}, arity={self.arity}, evals={self._count})"


def as_density(f, arity: int = 1) -> DensityFn:
    """Wrap a plain callable, passing :class:`DensityFn` instances through."""
    if isinstance(f, DensityFn):
        if f.arity != arity:
            raise ValueError(f"expected a density of arity {arity}, got {f.arity}")
        return f
    if not callable(f):
        raise TypeError(f"density must be callable, got {type(f).__name__}")
    return DensityFn(f, arity)
