"""Seeded random point sets over dyadic shells, and their on-disk format.

Every lattice point gets an i.i.d.-quality uniform in [0, 1) from a fixed,
stateless 64-bit mix of (seed, x, y); the point is kept iff that uniform is
below its shell's inclusion probability.  Because the uniform is a pure
function of the key, membership decisions are independent of enumeration
order and chunking, identical realizations can be revisited point by point,
and raising ``c`` only ever adds points (the uniforms do not move).

The mix is two rounds of the splitmix64 finalizer over coordinate-salted
inputs::

    h = mix64(mix64(seed ^ x * 0x9E3779B97F4A7C15) ^ y * 0xC2B2AE3D27D4EB4F)
    u = (h >> 11) * 2.0**-53

with mix64(z) the usual shift-xor-multiply avalanche
(z ^= z >> 30; z *= 0xBF58476D1CE4E5B9; z ^= z >> 27;
z *= 0x94D049BB133111EB; z ^= z >> 31).  The scalar path below and the
vectorized numpy path agree bit for bit; a test pins both.

Inclusion probabilities: shell T >= 1 keeps a point with probability
min(1, c / (2**T * sqrt(T))); shell 0 (the single point (1, 1)) with
probability min(1, c).
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .geom import Point, inf_norm, norm_lex_key, shell_index, shell_size

WINDOW_EXPONENT_CAP = 20

_MASK64 = (1 << 64) - 1
_X_SALT = 0x9E3779B97F4A7C15
_Y_SALT = 0xC2B2AE3D27D4EB4F
_MIX_MUL1 = 0xBF58476D1CE4E5B9
_MIX_MUL2 = 0x94D049BB133111EB

# Target number of grid cells evaluated per vectorized block.
_BLOCK_CELLS = 1 << 21

FORMAT_MAGIC = "#no3l v1"
_META_KEYS = ("kind", "seed", "c", "window_exponent")


def _mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * _MIX_MUL1) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX_MUL2) & _MASK64
    return z ^ (z >> 31)


def point_uniform(seed: int, x: int, y: int) -> float:
    """The uniform in [0, 1) attached to (x, y) under this seed."""
    h = _mix64(seed ^ ((x * _X_SALT) & _MASK64))
    h = _mix64(h ^ ((y * _Y_SALT) & _MASK64))
    return (h >> 11) * 2.0**-53


def _mix64_vec(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX_MUL1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX_MUL2)
    return z ^ (z >> np.uint64(31))


def shell_probability(T: int, c: float) -> float:
    """Inclusion probability on shell T at sampling rate c >= 0."""
    if T < 0:
        raise ValueError(f"shell exponent must be >= 0, got {T}")
    if c < 0:
        raise ValueError(f"sampling rate must be >= 0, got {c}")
    if T == 0:
        return min(1.0, c)
    return min(1.0, c / ((1 << T) * math.sqrt(T)))


def inclusion_probability(p: Point, c: float) -> float:
    """Inclusion probability of point p; positive rate c required."""
    if c <= 0:
        raise ValueError(f"sampling rate must be > 0, got {c}")
    return shell_probability(shell_index(p), c)


def expected_shell_count(T: int, c: float) -> float:
    """Expected number of sampled points on shell T."""
    return shell_size(T) * shell_probability(T, c)


@dataclass(frozen=True)
class SamplerConfig:
    """Seed, rate and window for one realization.

    The window of exponent W is the grid [1, 2**W - 1]^2, i.e. the union of
    shells 0 .. W-1.
    """

    seed: int
    c: float
    window_exponent: int

    def __post_init__(self) -> None:
        if not 0 <= self.seed < 1 << 64:
            raise ValueError(f"seed must fit in 64 bits, got {self.seed}")
        if self.c < 0 or not math.isfinite(self.c):
            raise ValueError(f"sampling rate must be finite and >= 0, got {self.c}")
        if not 1 <= self.window_exponent <= WINDOW_EXPONENT_CAP:
            raise ValueError(
                f"window exponent must be in [1, {WINDOW_EXPONENT_CAP}],"
                f" got {self.window_exponent}"
            )


class PointSet:
    """Finite duplicate-free point set, stored in (inf_norm, x, y) order.

    ``meta`` carries provenance: at least the keys kind, seed, c and
    window_exponent (absent values are None).  When window_exponent is set,
    all members must lie inside that window.
    """

    __slots__ = ("points", "meta")

    def __init__(self, points: Iterable[Point], meta: dict | None = None):
        pts = sorted(((int(x), int(y)) for x, y in points), key=norm_lex_key)
        for i in range(1, len(pts)):
            if pts[i - 1] == pts[i]:
                raise ValueError(f"duplicate point {pts[i]}")
        full_meta = {k: None for k in _META_KEYS}
        full_meta.update(meta or {})
        w = full_meta.get("window_exponent")
        if w is not None:
            limit = (1 << w) - 1
            for p in pts:
                if not (1 <= p[0] <= limit and 1 <= p[1] <= limit):
                    raise ValueError(
                        f"point {p} outside declared window [1, {limit}]^2"
                    )
        self.points: tuple[Point, ...] = tuple(pts)
        self.meta: dict = full_meta

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[Point]:
        return iter(self.points)

    def __contains__(self, p: object) -> bool:
        return p in self.points

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PointSet):
            return NotImplemented
        return self.points == other.points and self.meta == other.meta

    def __repr__(self) -> str:
        return f"PointSet({len(self.points)} points, meta={self.meta!r})"

    def in_box(self, n: int) -> "PointSet":
        """Members inside [1, n]^2, same provenance."""
        kept = [p for p in self.points if 1 <= p[0] <= n and 1 <= p[1] <= n]
        return PointSet(kept, self.meta)


def sample_window(cfg: SamplerConfig) -> PointSet:
    """One seeded realization over the window of cfg.

    Shells are scanned in row bands with the vectorized mix; the point (1, 1)
    of shell 0 goes through the scalar path, which is bit-identical.
    """
    meta = {
        "kind": "sampled",
        "seed": cfg.seed,
        "c": cfg.c,
        "window_exponent": cfg.window_exponent,
    }
    if cfg.c == 0:
        return PointSet((), meta)

    xs_out: list[np.ndarray] = []
    ys_out: list[np.ndarray] = []
    if point_uniform(cfg.seed, 1, 1) < shell_probability(0, cfg.c):
        xs_out.append(np.array([1], dtype=np.int64))
        ys_out.append(np.array([1], dtype=np.int64))

    seed = np.uint64(cfg.seed)
    for T in range(1, cfg.window_exponent):
        prob = shell_probability(T, cfg.c)
        if prob == 0.0:
            continue
        lo, hi = 1 << T, (1 << (T + 1)) - 1
        # Shell T as two rectangles of rows: x < lo with y in [lo, hi], and
        # x in [lo, hi] with y in [1, hi].
        for x_lo, x_hi, y_lo, y_hi in ((1, lo - 1, lo, hi), (lo, hi, 1, hi)):
            if x_lo > x_hi:
                continue
            width = y_hi - y_lo + 1
            ys = np.arange(y_lo, y_hi + 1, dtype=np.uint64)
            y_salted = ys * np.uint64(_Y_SALT)
            rows_per_block = max(1, _BLOCK_CELLS // width)
            for x0 in range(x_lo, x_hi + 1, rows_per_block):
                x1 = min(x0 + rows_per_block - 1, x_hi)
                xs = np.arange(x0, x1 + 1, dtype=np.uint64)
                h1 = _mix64_vec(seed ^ (xs * np.uint64(_X_SALT)))
                h = _mix64_vec(h1[:, None] ^ y_salted[None, :])
                u = (h >> np.uint64(11)).astype(np.float64) * 2.0**-53
                keep_x, keep_y = np.nonzero(u < prob)
                if keep_x.size:
                    xs_out.append(keep_x.astype(np.int64) + x0)
                    ys_out.append(keep_y.astype(np.int64) + y_lo)

    if not xs_out:
        return PointSet((), meta)
    x = np.concatenate(xs_out)
    y = np.concatenate(ys_out)
    order = np.lexsort((y, x, np.maximum(x, y)))
    pts = [(int(a), int(b)) for a, b in zip(x[order], y[order])]
    return PointSet(pts, meta)


def shell_counts(ps: PointSet, window_exponent: int) -> list[int]:
    """Count members per shell T = 0 .. window_exponent - 1."""
    if window_exponent < 1:
        raise ValueError(f"window exponent must be >= 1, got {window_exponent}")
    counts = [0] * window_exponent
    for p in ps.points:
        T = shell_index(p)
        if T >= window_exponent:
            raise ValueError(f"point {p} outside window of exponent {window_exponent}")
        counts[T] += 1
    return counts


def write_pointset(ps: PointSet, path: str | os.PathLike) -> None:
    """Serialize: magic line, one-line JSON meta, then x<TAB>y rows in order."""
    meta = {k: ps.meta.get(k) for k in _META_KEYS}
    with open(path, "w", encoding="ascii") as fh:
        fh.write(FORMAT_MAGIC + "\n")
        fh.write("#meta " + json.dumps(meta, sort_keys=True) + "\n")
        for x, y in ps.points:
            fh.write(f"{x}\t{y}\n")


def read_pointset(path: str | os.PathLike) -> PointSet:
    """Parse the format written by write_pointset; strict about order."""
    with open(path, "r", encoding="ascii") as fh:
        magic = fh.readline().rstrip("\n")
        if magic != FORMAT_MAGIC:
            raise ValueError(f"{path}: bad magic line {magic!r}")
        meta_line = fh.readline().rstrip("\n")
        if not meta_line.startswith("#meta "):
            raise ValueError(f"{path}: missing #meta line")
        try:
            meta = json.loads(meta_line[len("#meta "):])
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}:2: meta is not valid JSON ({exc})") from exc
        if not isinstance(meta, dict):
            raise ValueError(f"{path}: meta is not a JSON object")
        pts: list[Point] = []
        prev_key = None
        for ln, line in enumerate(fh, start=3):
            fields = line.rstrip("\n").split("\t")
            if len(fields) != 2:
                raise ValueError(f"{path}:{ln}: expected two tab-separated fields")
            p = (int(fields[0]), int(fields[1]))
            key = norm_lex_key(p)
            if prev_key is not None and key <= prev_key:
                raise ValueError(f"{path}:{ln}: points not strictly ordered at {p}")
            prev_key = key
            pts.append(p)
    return PointSet(pts, meta)
