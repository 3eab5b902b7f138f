"""Constructions of point sets with no three collinear members.

The randomized route takes a sampled set Q and deletes every point that is
the largest member, in the (inf_norm, x, y) order, of some collinear triple
of Q.  What survives contains no triple at all: a triple of survivors would
still have a largest member, and that member would have been deleted.  The
deletion rule never looks at points larger than the victim, so the survivor
set restricted to any norm prefix depends only on Q restricted to that
prefix, and each shell loses at most the number of triples living in the
next enclosing box.

Two deterministic baselines are included for comparison: the classical
parabola t -> t**2 - 1 reduced mod a prime, which is triple-free because a
quadratic residue equation mod p has at most two roots, and a greedy scan
that accepts points in (inf_norm, x, y) order whenever they close no triple.
"""

from __future__ import annotations

import math
from typing import Sequence

from .geom import Point, line_points_in_rect, line_through
from .sampling import PointSet
from .triples import prefix_triple_counts

GREEDY_WINDOW_CAP = 13
PARABOLA_MODULUS_CAP = 1 << 32


def delete_max_of_triples(sample: PointSet) -> PointSet:
    """Remove each point that closes a triple of smaller-or-equal points."""
    counts = prefix_triple_counts(sample)
    survivors = [p for p, t in zip(sample.points, counts) if t == 0]
    meta = {
        "kind": "constructed",
        "seed": sample.meta.get("seed"),
        "c": sample.meta.get("c"),
        "window_exponent": sample.meta.get("window_exponent"),
    }
    return PointSet(survivors, meta)


def _is_prime(n: int) -> bool:
    # Deterministic Miller-Rabin; the witness set {2, 7, 61} is exact for
    # n < 4_759_123_141, which covers the modulus cap.
    if n < 2:
        return False
    for small in (2, 3, 5, 7, 11, 13):
        if n % small == 0:
            return n == small
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in (2, 7, 61):
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def modular_parabola(p: int) -> PointSet:
    """The p points (t, ((t*t - 1) mod p) + 1) for t = 1 .. p; triple-free."""
    if p >= PARABOLA_MODULUS_CAP:
        raise ValueError(f"modulus {p} exceeds cap {PARABOLA_MODULUS_CAP}")
    if not _is_prime(p):
        raise ValueError(f"modulus must be prime, got {p}")
    pts = [(t, ((t * t - 1) % p) + 1) for t in range(1, p + 1)]
    return PointSet(pts, {"kind": "baseline"})


def greedy_construct(window_exponent: int) -> PointSet:
    """Greedy scan of [1, 2**W - 1]^2 in (inf_norm, x, y) order.

    A candidate is rejected iff it lies on a line through two already
    accepted points.  Rather than rescanning accepted pairs, every line
    through a newly accepted point and an earlier accepted point is walked
    once and its grid points marked blocked; accepted sets stay triple-free,
    so no line is ever walked twice.
    """
    if not 1 <= window_exponent <= GREEDY_WINDOW_CAP:
        raise ValueError(
            f"window exponent must be in [1, {GREEDY_WINDOW_CAP}],"
            f" got {window_exponent}"
        )
    n = (1 << window_exponent) - 1
    blocked = bytearray((n + 1) * (n + 1))
    accepted: list[Point] = []
    for norm in range(1, n + 1):
        for cand in ((x, norm) for x in range(1, norm)):
            _greedy_step(cand, accepted, blocked, n)
        for cand in ((norm, y) for y in range(1, norm + 1)):
            _greedy_step(cand, accepted, blocked, n)
    meta = {"kind": "baseline", "window_exponent": window_exponent}
    return PointSet(accepted, meta)


def _greedy_step(
    cand: Point, accepted: list[Point], blocked: bytearray, n: int
) -> None:
    if blocked[cand[0] * (n + 1) + cand[1]]:
        return
    for prior in accepted:
        for x, y in line_points_in_rect(line_through(cand, prior), n):
            blocked[x * (n + 1) + y] = 1
    accepted.append(cand)


def density_profile(
    ps: PointSet, side_lengths: Sequence[int]
) -> list[tuple[int, int, float]]:
    """Rows (n, members in [1, n]^2, count * sqrt(ln n) / n).

    The natural logarithm is used.  For sets carrying a window exponent W the
    profile is only meaningful, and only allowed, for n <= 2**(W - 1): larger
    boxes leak out of the region the construction has actually filled.
    """
    w = ps.meta.get("window_exponent")
    rows = []
    for n in side_lengths:
        if n < 2:
            raise ValueError(f"density needs box side >= 2, got {n}")
        if w is not None and n > 1 << (w - 1):
            raise ValueError(
                f"box side {n} exceeds 2**{w - 1}, the valid range for a"
                f" window of exponent {w}"
            )
        count = sum(1 for x, y in ps.points if 1 <= x <= n and 1 <= y <= n)
        rows.append((n, count, count * math.sqrt(math.log(n)) / n))
    return rows
