"""Exact geometry of the integer lattice.

Everything here is decided in exact integer arithmetic (Python ints do not
overflow), so collinearity, line membership and shell indices are never
subject to rounding.  Conventions used throughout the package:

* a point is an ``(x, y)`` tuple of ints; construction-facing sets live in
  the positive quadrant ``{1, 2, ...}^2``,
* shell ``T`` is the set of points whose infinity norm lies in
  ``[2**T, 2**(T+1))``; the box of exponent ``T`` is ``[1, 2**T]^2``,
* an unoriented direction is the coprime vector ``(a, b)`` normalized so
  that ``b > 0``, or ``b == 0 and a > 0``,
* the line with direction ``(a, b)`` and offset ``k`` is
  ``{(x, y) : b*x - a*y == k}``; walking the line means stepping by
  ``(a, b)``,
* points are totally ordered by ``(inf_norm, x, y)``; "largest" always
  refers to this order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

Point = tuple[int, int]
Direction = tuple[int, int]

# Shell sizes are kept within 64-bit range; nothing in the package needs
# shells beyond exponent 30.
SHELL_EXPONENT_CAP = 30


def inf_norm(p: Point) -> int:
    """max(|x|, |y|)."""
    return max(abs(p[0]), abs(p[1]))


def norm_lex_key(p: Point) -> tuple[int, int, int]:
    """Sort key realizing the (inf_norm, x, y) total order."""
    return (inf_norm(p), p[0], p[1])


def shell_index(p: Point) -> int:
    """Exponent T with 2**T <= inf_norm(p) < 2**(T+1).

    Uses bit length, never floating-point logs.  The origin has no shell.
    """
    m = inf_norm(p)
    if m == 0:
        raise ValueError("the origin lies in no shell")
    return m.bit_length() - 1


def shell_size(T: int) -> int:
    """Number of positive-quadrant points in shell T: 3*4**T - 2*2**T."""
    if T < 0:
        raise ValueError(f"shell exponent must be >= 0, got {T}")
    if T > SHELL_EXPONENT_CAP:
        raise OverflowError(f"shell exponent {T} exceeds cap {SHELL_EXPONENT_CAP}")
    return 3 * 4**T - 2 * 2**T


def canonical_direction(v: tuple[int, int]) -> Direction:
    """Reduce v by its gcd and fix the sign so b > 0, or b == 0 and a > 0."""
    a, b = v
    if a == 0 and b == 0:
        raise ValueError("zero vector has no direction")
    g = math.gcd(a, b)
    a //= g
    b //= g
    if b < 0 or (b == 0 and a < 0):
        a, b = -a, -b
    return (a, b)


def collinear(p: Point, q: Point, r: Point) -> bool:
    """True iff p, q, r lie on one line (repeated points count as collinear)."""
    return (q[0] - p[0]) * (r[1] - p[1]) == (q[1] - p[1]) * (r[0] - p[0])


@dataclass(frozen=True)
class LatticeLine:
    """The set {(x, y) : b*x - a*y == k} for canonical direction (a, b)."""

    direction: Direction
    offset: int

    def __post_init__(self) -> None:
        if self.direction != canonical_direction(self.direction):
            raise ValueError(f"direction {self.direction} is not canonical")

    def contains(self, p: Point) -> bool:
        a, b = self.direction
        return b * p[0] - a * p[1] == self.offset


def line_through(p: Point, q: Point) -> LatticeLine:
    """The unique lattice line containing two distinct points."""
    if p == q:
        raise ValueError(f"need two distinct points, got {p} twice")
    a, b = canonical_direction((q[0] - p[0], q[1] - p[1]))
    return LatticeLine((a, b), b * p[0] - a * p[1])


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, u, v) with u*a + v*b == g == gcd(a, b)."""
    old_r, r = a, b
    old_u, u = 1, 0
    old_v, v = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_u, u = u, old_u - q * u
        old_v, v = v, old_v - q * v
    if old_r < 0:
        old_r, old_u, old_v = -old_r, -old_u, -old_v
    return old_r, old_u, old_v


def _ceil_div(p: int, q: int) -> int:
    # q > 0
    return -((-p) // q)


def line_points_in_rect(line: LatticeLine, n: int) -> list[Point]:
    """All points of the line inside [1, n]^2, ordered along the direction."""
    if n < 1:
        raise ValueError(f"box side must be >= 1, got {n}")
    a, b = line.direction
    k = line.offset
    # Base solution of b*x - a*y = k from u*b + v*a = 1.
    g, u, v = _xgcd(b, a)
    assert g == 1
    x0 = u * k
    y0 = -v * k
    # Parametrize (x0 + s*a, y0 + s*b) and intersect both coordinate ranges.
    lo, hi = None, None
    for base, step in ((x0, a), (y0, b)):
        if step > 0:
            slo = _ceil_div(1 - base, step)
            shi = (n - base) // step
        elif step < 0:
            slo = _ceil_div(base - n, -step)
            shi = (base - 1) // (-step)
        else:
            if not 1 <= base <= n:
                return []
            continue
        lo = slo if lo is None else max(lo, slo)
        hi = shi if hi is None else min(hi, shi)
    assert lo is not None and hi is not None
    return [(x0 + s * a, y0 + s * b) for s in range(lo, hi + 1)]


def line_points_in_box(line: LatticeLine, T: int) -> list[Point]:
    """All points of the line inside the box [1, 2**T]^2."""
    if T < 0:
        raise ValueError(f"box exponent must be >= 0, got {T}")
    return line_points_in_rect(line, 1 << T)


def primitive_directions_with_norm(m: int) -> list[Direction]:
    """Canonical coprime directions of infinity norm exactly m.

    For m == 1 these are (1, 0), (0, 1), (1, 1), (-1, 1); for m >= 2 there
    are 4*phi(m) of them, obtained from coprime pairs (m, j) and (j, m)
    in both sign classes.  Sorted by (b, a).
    """
    if m < 1:
        raise ValueError(f"direction norm must be >= 1, got {m}")
    if m == 1:
        dirs = [(1, 0), (0, 1), (1, 1), (-1, 1)]
    else:
        dirs = []
        for j in range(1, m):
            if math.gcd(j, m) == 1:
                dirs.extend([(j, m), (-j, m), (m, j), (-m, j)])
    return sorted(dirs, key=lambda d: (d[1], d[0]))


def _line_meets_shell(line: LatticeLine, t: int) -> bool:
    """Does the line contain a positive-quadrant point of shell t?"""
    # Shell t is contained in [1, 2**(t+1) - 1]^2; filter by norm exactly.
    lo = 1 << t
    for p in line_points_in_rect(line, (1 << (t + 1)) - 1):
        if inf_norm(p) >= lo:
            return True
    return False


def lines_meeting_shell(v: Direction, t: int) -> list[LatticeLine]:
    """All lines of direction v meeting shell t, in increasing offset order.

    Candidate offsets satisfy |k| <= 4 * inf_norm(v) * 2**t; each candidate
    is kept only if the line really contains a shell point.
    """
    if t < 0:
        raise ValueError(f"shell exponent must be >= 0, got {t}")
    a, b = canonical_direction(v)
    m = max(abs(a), abs(b))
    bound = 4 * m * (1 << t)
    out = []
    for k in range(-bound, bound + 1):
        line = LatticeLine((a, b), k)
        if _line_meets_shell(line, t):
            out.append(line)
    return out


def first_shell(line: LatticeLine, t_cap: int = 40) -> int:
    """Smallest t such that the line meets shell t; errors past t_cap."""
    for t in range(t_cap + 1):
        if _line_meets_shell(line, t):
            return t
    raise ValueError(f"line {line} meets no shell up to exponent {t_cap}")
