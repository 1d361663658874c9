"""Seeded uniform source and sample batches with CSV round-tripping."""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

_SEED_MASK = (1 << 64) - 1


class UniformSource:
    """Reproducible stream of uniforms on ``[0, 1)`` with 53 random bits.

    Backed by numpy's PCG64 generator. ``seed=None`` draws a fresh 64-bit
    seed from OS entropy and records it so the stream can be replayed.
    """

    def __init__(self, seed: int | None = None):
        if seed is None:
            seed = int(np.random.SeedSequence().generate_state(1, np.uint64)[0])
        seed = int(seed)
        if not 0 <= seed <= _SEED_MASK:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
        self.seed = seed
        self._gen = np.random.Generator(np.random.PCG64(seed))

    def random(self, size=None):
        return self._gen.random(size)

    def spawn(self, n: int) -> list[UniformSource]:
        """Independent child streams, deterministic in (seed, n)."""
        children = np.random.SeedSequence(self.seed).spawn(n)
        return [UniformSource(int(c.generate_state(1, np.uint64)[0])) for c in children]

    def __repr__(self):
        return f"UniformSource(seed={self.seed})"


def as_uniform_source(random_state) -> UniformSource:
    """Accept ``None``, an integer seed, or an existing :class:`UniformSource`."""
    if isinstance(random_state, UniformSource):
        return random_state
    if random_state is None or isinstance(random_state, (int, np.integer)):
        return UniformSource(None if random_state is None else int(random_state))
    raise TypeError(f"cannot build a uniform source from {type(random_state).__name__}")


@dataclass
class SampleBatch:
    """Draws together with the seed (and optionally the uniforms) behind them.

    ``points`` has shape ``(n,)`` in 1D and ``(n, 2)`` in 2D.
    """

    points: np.ndarray
    seed: int | None = None
    uniforms: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)

    @property
    def n(self) -> int:
        return int(self.points.shape[0])

    @property
    def ndim(self) -> int:
        return 1 if self.points.ndim == 1 else self.points.shape[1]

    def __len__(self):
        return self.n

    def to_csv(self, path_or_buf=None) -> str | None:
        text = format_csv(self.points, self.seed)
        if path_or_buf is None:
            return text
        if hasattr(path_or_buf, "write"):
            path_or_buf.write(text)
        else:
            with open(path_or_buf, "w", newline="") as fh:
                fh.write(text)
        return None

    @classmethod
    def from_csv(cls, path_or_buf) -> SampleBatch:
        return read_csv(path_or_buf)


def format_csv(points, seed=None) -> str:
    pts = np.asarray(points, dtype=float)
    out = io.StringIO()
    if seed is not None:
        out.write(f"# seed={seed}\n")
    if pts.ndim == 1:
        out.write("x\n")
        for v in pts.tolist():
            out.write(f"{v!r}\n")
    else:
        out.write("x,y\n")
        for u, v in pts.tolist():
            out.write(f"{u!r},{v!r}\n")
    return out.getvalue()


def read_csv(path_or_buf) -> SampleBatch:
    if hasattr(path_or_buf, "read"):
        lines = path_or_buf.read().splitlines()
    else:
        with open(path_or_buf) as fh:
            lines = fh.read().splitlines()
    seed = None
    header = None
    rows = []
    for line in lines:
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, _, val = line[1:].strip().partition("=")
            if key.strip() == "seed" and val:
                seed = int(val)
            continue
        if header is None:
            header = [h.strip() for h in line.split(",")]
            if header not in (["x"], ["x", "y"]):
                raise ValueError(f"unexpected CSV header {line!r}")
            continue
        rows.append([float(v) for v in line.split(",")])
    if header is None:
        raise ValueError("CSV has no header")
    width = len(header)
    pts = np.array(rows, dtype=float).reshape(-1, width)
    if width == 1:
        pts = pts[:, 0]
    return SampleBatch(pts, seed)
