"""Torus grid networks parametrized by (lambda, delta, p).

Headings are numbered clockwise: N=0, E=1, S=2, W=3. Row indices grow
southward. Every intersection owns the four blocks leaving it, so the
outgoing block of intersection ``i`` with heading ``d`` has id ``4*i + d``.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

N, E, S, W = 0, 1, 2, 3
HEADINGS = "NESW"
# (d_row, d_col) per heading
_OFFSETS = ((-1, 0), (0, 1), (1, 0), (0, -1))

MIN_ELL = 6
MIN_BLOCK = 2


class ParameterError(ValueError):
    """A configuration value is outside its allowed range."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


class StructuralError(ValueError):
    """Inputs that do not fit together (shapes, networks, grids)."""


def round_half_up(x: float) -> int:
    return int(np.floor(x + 0.5))


@dataclass(frozen=True)
class NetworkConfig:
    rows: int = 8
    cols: int = 8
    ell: int = 10
    lam: float = 1.0
    delta: float = 0.0
    p: float = 0.75
    seed: int = 0

    def __post_init__(self):
        self.validate()

    def validate(self):
        if int(self.rows) != self.rows or self.rows < 1:
            raise ParameterError("rows", "must be a positive integer")
        if int(self.cols) != self.cols or self.cols < 1:
            raise ParameterError("cols", "must be a positive integer")
        if int(self.ell) != self.ell or self.ell < MIN_ELL:
            raise ParameterError("ell", f"must be an integer >= {MIN_ELL}")
        if not np.isfinite(self.lam) or self.lam <= 0:
            raise ParameterError("lambda", "must be positive")
        if not np.isfinite(self.delta) or self.delta < 0:
            raise ParameterError("delta", "must be nonnegative")
        if not 0 <= self.p <= 1:
            raise ParameterError("p", "must lie in [0, 1]")
        if self.ell * (1 - self.delta) < MIN_BLOCK:
            raise ParameterError("delta", f"ell*(1-delta) must be >= {MIN_BLOCK}")


def sample_block_lengths(n: int, ell: float, delta: float, seed) -> np.ndarray:
    """Integer block lengths from the symmetric two-point law around ``ell``.

    Draws are balanced: half the blocks get round(ell*(1-delta)) and half
    round(ell*(1+delta)), shuffled, with the odd one out decided by a coin.
    Each block still has probability 1/2 of either value, and the sample
    moments match (ell, delta) up to rounding.
    """
    if n < 1:
        raise ParameterError("n", "must be >= 1")
    if delta < 0:
        raise ParameterError("delta", "must be nonnegative")
    if ell * (1 - delta) < MIN_BLOCK:
        raise ParameterError("delta", f"ell*(1-delta) must be >= {MIN_BLOCK}")
    short, long_ = round_half_up(ell * (1 - delta)), round_half_up(ell * (1 + delta))
    if short == long_:
        return np.full(n, short, dtype=np.int64)
    rng = np.random.default_rng(seed)
    is_long = np.zeros(n, dtype=bool)
    is_long[: n // 2] = True
    if n % 2:
        is_long[-1] = rng.random() < 0.5
    rng.shuffle(is_long)
    return np.where(is_long, long_, short).astype(np.int64)


@dataclass(frozen=True, eq=False)
class Network:
    cfg: NetworkConfig
    rows: int
    cols: int
    lengths: np.ndarray  # per block id
    starts: np.ndarray
    inc: np.ndarray  # (I, 4) block arriving at i with heading d
    out: np.ndarray  # (I, 4) block leaving i with heading d
    ncells: int
    nxt: np.ndarray = field(repr=False)  # downstream neighbour per cell, self for stop lines
    prev: np.ndarray = field(repr=False)  # upstream neighbour per cell, ncells for entries
    block_of_cell: np.ndarray = field(repr=False)

    @property
    def n_intersections(self) -> int:
        return self.rows * self.cols

    @property
    def n_blocks(self) -> int:
        return self.lengths.size

    @property
    def entry(self) -> np.ndarray:
        return self.starts

    @property
    def stopline(self) -> np.ndarray:
        return self.starts + self.lengths - 1

    def block_source(self, b: int) -> tuple[int, int]:
        return divmod(int(b) // 4, self.cols)

    def block_heading(self, b: int) -> int:
        return int(b) % 4

    def block_target(self, b: int) -> tuple[int, int]:
        r, c = self.block_source(b)
        dr, dc = _OFFSETS[self.block_heading(b)]
        return (r + dr) % self.rows, (c + dc) % self.cols

    def fingerprint(self) -> str:
        h = hashlib.sha1()
        h.update(np.asarray([self.rows, self.cols], dtype=np.int64).tobytes())
        h.update(self.lengths.astype(np.int64).tobytes())
        return h.hexdigest()

    def to_text(self) -> str:
        """Adjacency and block lengths, one block per line."""
        lines = [
            f"# torus {self.rows}x{self.cols} blocks={self.n_blocks} cells={self.ncells}",
            "block,heading,from_row,from_col,to_row,to_col,length,first_cell",
        ]
        for b in range(self.n_blocks):
            r, c = self.block_source(b)
            tr, tc = self.block_target(b)
            lines.append(
                f"{b},{HEADINGS[b % 4]},{r},{c},{tr},{tc},{self.lengths[b]},{self.starts[b]}"
            )
        return "\n".join(lines) + "\n"


def _neighbour(r: int, c: int, d: int, rows: int, cols: int) -> tuple[int, int]:
    dr, dc = _OFFSETS[d]
    return (r + dr) % rows, (c + dc) % cols


def build_network(cfg: NetworkConfig) -> Network:
    cfg.validate()
    R, C = cfg.rows, cfg.cols
    seg = sample_block_lengths(2 * R * C, cfg.ell, cfg.delta, cfg.seed)
    horiz = seg[: R * C].reshape(R, C)  # segment (r,c)-(r,c+1)
    vert = seg[R * C :].reshape(R, C)  # segment (r,c)-(r+1,c)

    n_int = R * C
    lengths = np.empty(4 * n_int, dtype=np.int64)
    out = np.arange(4 * n_int, dtype=np.int64).reshape(n_int, 4)
    inc = np.empty((n_int, 4), dtype=np.int64)
    for r in range(R):
        for c in range(C):
            i = r * C + c
            lengths[4 * i + N] = vert[(r - 1) % R, c]
            lengths[4 * i + S] = vert[r, c]
            lengths[4 * i + E] = horiz[r, c]
            lengths[4 * i + W] = horiz[r, (c - 1) % C]
            for d in range(4):
                # the block arriving with heading d left the neighbour behind us
                sr, sc = _neighbour(r, c, (d + 2) % 4, R, C)
                inc[i, d] = 4 * (sr * C + sc) + d

    starts = np.concatenate(([0], np.cumsum(lengths)[:-1]))
    ncells = int(lengths.sum())
    idx = np.arange(ncells, dtype=np.int64)
    stop = starts + lengths - 1
    nxt = idx + 1
    nxt[stop] = stop
    prev = idx - 1
    prev[starts] = ncells
    block_of_cell = np.repeat(np.arange(lengths.size), lengths)
    for a in (lengths, starts, inc, out, nxt, prev, block_of_cell):
        a.setflags(write=False)
    return Network(cfg, R, C, lengths, starts, inc, out, ncells, nxt, prev, block_of_cell)
