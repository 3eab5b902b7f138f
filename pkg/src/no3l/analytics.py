"""Exact first- and second-moment analysis of triple counts in dyadic boxes.

For the random set that keeps each point x of the box [1, 2**T]^2
independently with probability p(x), the expected number of collinear
triples is

    E[Y_T] = sum over lines L of e3(p restricted to L),

with e3 the third elementary symmetric function.  Writing W(L) for the sum
of p over the line and W_j(L) for the sum of p**j, Newton's identities give

    e3 = (W**3 - 3*W*W_2 + 2*W_3) / 6,

so everything reduces to per-line power sums.  Those are computed without
materializing any line: for a canonical direction (a, b) the offset
k = b*x - a*y indexes the parallel family, and weighted bincounts over k
accumulate W, W_2, W_3 per line in one vectorized pass per direction.

Lines with a single box point would be enumerated wastefully, so each
direction is scanned over three rectangles: the points with an in-box
neighbour at +(a, b), those with one at -(a, b), and (subtracted once) those
with both.  Every point of every line with at least two box points is
counted exactly once, and one-point lines drop out altogether.

The same pass serves the variance split for Y_T.  With

    beta(x) = sum over pairs {y, z} such that x, y, z are collinear
              of p(y) * p(z),

the three variance contributions are bounded by sum_w3 and sum_w4 (the sums
of W**3 and W**4 over lines with >= 2 points), E[Y_T] itself, and
sum of p(x) * beta(x)**2.  beta also satisfies the exact identity
sum of p(x) * beta(x) = 3 * E[Y_T], which makes a sharp self-test.

Caps: full line-family scans are quartic-ish in the box side, so exact
enumeration is allowed up to box exponent 7 and the variance machinery up
to 6.  Desk-scale Monte Carlo estimates for the same quantities have no cap
beyond the sampling window's.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .geom import LatticeLine, Point, _xgcd, line_points_in_box, shell_index
from .parallel import map_ordered
from .sampling import SamplerConfig, sample_window, shell_counts, shell_probability
from .triples import box_triple_counts

ENUMERATION_CAP = 7
VARIANCE_CAP = 6


def _require_cap(T: int, cap: int, what: str) -> None:
    if T < 0:
        raise ValueError(f"box exponent must be >= 0, got {T}")
    if T > cap:
        raise ValueError(f"{what} is capped at box exponent {cap}, got {T}")


def line_weight(line: LatticeLine, T: int, c: float) -> float:
    """Sum of inclusion probabilities over the line's points in [1, 2**T]^2."""
    pts = line_points_in_box(line, T)
    return math.fsum(shell_probability(shell_index(p), c) for p in pts)


def line_weight_excluding(line: LatticeLine, T: int, c: float, x: Point) -> float:
    """line_weight minus the contribution of x, which must lie on the line."""
    pts = line_points_in_box(line, T)
    if x not in pts:
        raise ValueError(f"point {x} is not on {line} within the box 2**{T}")
    return math.fsum(shell_probability(shell_index(p), c) for p in pts if p != x)


def _box_directions(n: int) -> list[tuple[int, int]]:
    """Canonical directions realized by point pairs of [1, n]^2, by (b, a)."""
    dirs = [(1, 0), (0, 1)] if n >= 2 else []
    for b in range(1, n):
        for a in range(-(n - 1), n):
            if a != 0 and math.gcd(a, b) == 1:
                dirs.append((a, b))
    return sorted(dirs, key=lambda d: (d[1], d[0]))


def _probability_grids(T: int, c: float) -> tuple[np.ndarray, ...]:
    """P, P**2, P**3 over the box, with P[x-1, y-1] the inclusion probability."""
    n = 1 << T
    shells = np.array([v.bit_length() - 1 for v in range(1, n + 1)], dtype=np.int64)
    table = np.array([shell_probability(t, c) for t in range(T + 1)])
    grid_t = np.maximum.outer(shells, shells)
    P = table[grid_t]
    return P, P * P, P * P * P


def _direction_line_sums(
    n: int, a: int, b: int, grids: tuple[np.ndarray, ...]
) -> tuple[int, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Per-line counts and power sums for one direction, indexed by offset.

    Returns (kmin, cnt, w1, w2, w3); bin j describes the line with offset
    kmin + j.  Bins cover every offset the full box can realize, so lookups
    by arbitrary box points are always in range; only lines with >= 2 box
    points get nonzero entries.
    """
    kmin = b * 1 + min(-a * 1, -a * n)
    kmax = b * n + max(-a * 1, -a * n)
    span = kmax - kmin + 1
    cnt = np.zeros(span, dtype=np.int64)
    sums = [np.zeros(span) for _ in range(3)]
    # Points with an in-box neighbour at +(a, b), at -(a, b), minus both.
    rects = (
        (max(1, 1 - a), min(n, n - a), max(1, 1 - b), min(n, n - b), 1),
        (max(1, 1 + a), min(n, n + a), max(1, 1 + b), min(n, n + b), 1),
        (1 + abs(a), n - abs(a), 1 + abs(b), n - abs(b), -1),
    )
    for x_lo, x_hi, y_lo, y_hi, sign in rects:
        if x_lo > x_hi or y_lo > y_hi:
            continue
        xs = np.arange(x_lo, x_hi + 1, dtype=np.int64)
        ys = np.arange(y_lo, y_hi + 1, dtype=np.int64)
        idx = np.add.outer(b * xs - kmin, -a * ys).ravel()
        cnt += sign * np.bincount(idx, minlength=span)
        for acc, grid in zip(sums, grids):
            w = grid[x_lo - 1 : x_hi, y_lo - 1 : y_hi].ravel()
            acc += sign * np.bincount(idx, weights=w, minlength=span)
    return kmin, cnt, sums[0], sums[1], sums[2]


@dataclass(frozen=True)
class LineWeightReport:
    """Aggregates over all lines with >= 2 points in [1, 2**T]^2."""

    T: int
    c: float
    sum_w3: float
    sum_w4: float
    exact_ey: float
    line_count: int


@dataclass(frozen=True)
class VarianceBoundReport:
    """Upper bound sum for Var[Y_T], split into its three contributions."""

    T: int
    c: float
    v1_bound: float
    v2_bound: float
    v3_bound: float
    var_bound_total: float


def _family_scan(T: int, c: float, want_beta: bool):
    """One pass over all direction families; optionally also the beta grid."""
    if c <= 0:
        raise ValueError(f"sampling rate must be > 0, got {c}")
    n = 1 << T
    grids = _probability_grids(T, c)
    P, P2, _ = grids
    w3_parts: list[float] = []
    w4_parts: list[float] = []
    ey_parts: list[float] = []
    line_count = 0
    beta = np.zeros((n, n)) if want_beta else None
    xs_full = np.arange(1, n + 1, dtype=np.int64)
    for a, b in _box_directions(n):
        kmin, cnt, w1, w2, w3 = _direction_line_sums(n, a, b, grids)
        lines = cnt >= 2
        if lines.any():
            line_count += int(lines.sum())
            s1 = w1[lines]
            w3_parts.append(float(np.sum(s1**3)))
            w4_parts.append(float(np.sum(s1**4)))
            rich = cnt >= 3
            if rich.any():
                e3 = w1[rich] ** 3 - 3.0 * w1[rich] * w2[rich] + 2.0 * w3[rich]
                ey_parts.append(float(np.sum(e3)) / 6.0)
        if want_beta:
            idx = np.add.outer(b * xs_full - kmin, -a * xs_full)
            pair = 0.5 * ((w1[idx] - P) ** 2 - (w2[idx] - P2))
            beta += np.where(cnt[idx] >= 2, pair, 0.0)
    return (
        math.fsum(w3_parts),
        math.fsum(w4_parts),
        math.fsum(ey_parts),
        line_count,
        P,
        beta,
    )


def weight_sums(T: int, c: float) -> LineWeightReport:
    """Exact sums of W**3, W**4 and e3 over the box's line families."""
    _require_cap(T, ENUMERATION_CAP, "line family enumeration")
    sum_w3, sum_w4, exact_ey, line_count, _, _ = _family_scan(T, c, want_beta=False)
    return LineWeightReport(
        T=T, c=c, sum_w3=sum_w3, sum_w4=sum_w4, exact_ey=exact_ey,
        line_count=line_count,
    )


def enumerate_box_lines(T: int) -> Iterator[LatticeLine]:
    """Every line with >= 2 points in [1, 2**T]^2, grouped by direction."""
    _require_cap(T, ENUMERATION_CAP, "line family enumeration")
    n = 1 << T
    ones = (np.ones((n, n)),) * 3
    for a, b in _box_directions(n):
        kmin, cnt, _, _, _ = _direction_line_sums(n, a, b, ones)
        for j in np.nonzero(cnt >= 2)[0]:
            yield LatticeLine((a, b), kmin + int(j))


def beta(x: Point, T: int, c: float) -> float:
    """Sum of p(y) * p(z) over pairs making a collinear triple with x.

    Scalar reference route: bucket the other box points by direction seen
    from x and sum e2 per bucket; the vectorized grid must match it.
    """
    _require_cap(T, VARIANCE_CAP, "beta")
    n = 1 << T
    if not (1 <= x[0] <= n and 1 <= x[1] <= n):
        raise ValueError(f"point {x} outside box of exponent {T}")
    buckets: dict[tuple[int, int], list[float]] = {}
    for px in range(1, n + 1):
        for py in range(1, n + 1):
            if (px, py) == x:
                continue
            d = (px - x[0], py - x[1])
            g = math.gcd(d[0], d[1])
            d = (d[0] // g, d[1] // g)
            if d[1] < 0 or (d[1] == 0 and d[0] < 0):
                d = (-d[0], -d[1])
            buckets.setdefault(d, []).append(
                shell_probability(shell_index((px, py)), c)
            )
    total = []
    for probs in buckets.values():
        s1 = math.fsum(probs)
        s2 = math.fsum(q * q for q in probs)
        total.append((s1 * s1 - s2) / 2.0)
    return math.fsum(total)


def beta_box_grid(T: int, c: float) -> np.ndarray:
    """beta over the whole box; entry [x-1, y-1] is beta((x, y), T, c)."""
    _require_cap(T, VARIANCE_CAP, "beta")
    return _family_scan(T, c, want_beta=True)[5]


def variance_bounds(T: int, c: float) -> VarianceBoundReport:
    """The three-part upper bound for Var[Y_T].

    v1 bounds the covariance of triple pairs sharing one point by
    sum of p(x) * beta(x)**2; v2 bounds pairs sharing two points by sum_w4;
    v3 is the diagonal E[Y_T].
    """
    _require_cap(T, VARIANCE_CAP, "variance bounds")
    sum_w3, sum_w4, exact_ey, _, P, beta_grid = _family_scan(T, c, want_beta=True)
    v1 = float((P * beta_grid**2).sum())
    report = VarianceBoundReport(
        T=T, c=c, v1_bound=v1, v2_bound=sum_w4, v3_bound=exact_ey,
        var_bound_total=v1 + sum_w4 + exact_ey,
    )
    return report


@dataclass(frozen=True)
class TrialStatistics:
    """Seeded Monte Carlo moments of shell counts X_T and triple counts Y_T.

    Tail frequencies use the inclusive conventions
    x_tail_freq[i] = freq(X_T <= c * 2**(T-1) / sqrt(T)) and
    y_tail_freq[i] = freq(Y_T >= 2 * k1_hat * c**3 * 2**T / sqrt(T)).
    k1_hat and k2_hat are the largest normalized mean and variance of Y_T
    over the tested exponents: mean * sqrt(T) / (c**3 * 2**T) and
    var / (2**T * T**3.5).
    """

    t_values: list[int]
    c: float
    sample_size: int
    x_by_seed: list[list[int]]
    y_by_seed: list[list[int]]
    x_mean: list[float]
    x_var: list[float]
    y_mean: list[float]
    y_var: list[float]
    x_tail_freq: list[float]
    y_tail_freq: list[float]
    k1_hat: float
    k2_hat: float


def _mc_vectors(args: tuple[int, float, int]) -> tuple[list[int], list[int]]:
    seed, c, w = args
    ps = sample_window(SamplerConfig(seed=seed, c=c, window_exponent=w))
    return shell_counts(ps, w), box_triple_counts(ps, w - 1)


def monte_carlo_moments(
    t_values: Sequence[int], c: float, seeds: Sequence[int]
) -> TrialStatistics:
    """Sample X_T and Y_T over the given seeds and summarize their moments."""
    ts = list(t_values)
    if not ts or sorted(set(ts)) != ts:
        raise ValueError(f"need strictly increasing box exponents, got {t_values}")
    if ts[0] < 1:
        raise ValueError("box exponents below 1 have no normalized moments")
    if not seeds:
        raise ValueError("need at least one seed")
    if c < 0:
        raise ValueError(f"sampling rate must be >= 0, got {c}")
    w = ts[-1] + 1
    vectors = map_ordered(_mc_vectors, [(s, c, w) for s in seeds])
    x_by_seed = [[xv[t] for t in ts] for xv, _ in vectors]
    y_by_seed = [[yv[t] for t in ts] for _, yv in vectors]
    x_arr = np.array(x_by_seed, dtype=np.int64)
    y_arr = np.array(y_by_seed, dtype=np.int64)
    nseed = len(seeds)
    ddof = 1 if nseed > 1 else 0
    x_mean = x_arr.mean(axis=0)
    y_mean = y_arr.mean(axis=0)
    x_var = x_arr.var(axis=0, ddof=ddof)
    y_var = y_arr.var(axis=0, ddof=ddof)
    t_arr = np.array(ts, dtype=np.float64)
    if c > 0:
        k1_hat = float(np.max(y_mean * np.sqrt(t_arr) / (c**3 * 2.0**t_arr)))
    else:
        k1_hat = 0.0
    k2_hat = float(np.max(y_var / (2.0**t_arr * t_arr**3.5)))
    x_thresh = c * 2.0 ** (t_arr - 1) / np.sqrt(t_arr)
    y_thresh = 2.0 * k1_hat * c**3 * 2.0**t_arr / np.sqrt(t_arr)
    return TrialStatistics(
        t_values=ts,
        c=c,
        sample_size=nseed,
        x_by_seed=x_by_seed,
        y_by_seed=y_by_seed,
        x_mean=[float(v) for v in x_mean],
        x_var=[float(v) for v in x_var],
        y_mean=[float(v) for v in y_mean],
        y_var=[float(v) for v in y_var],
        x_tail_freq=[float(v) for v in (x_arr <= x_thresh).mean(axis=0)],
        y_tail_freq=[float(v) for v in (y_arr >= y_thresh).mean(axis=0)],
        k1_hat=k1_hat,
        k2_hat=k2_hat,
    )


def _min_box_norm_for_offsets(
    n: int, a: int, b: int, ks: np.ndarray
) -> np.ndarray:
    """Infinity norm of the smallest positive-quadrant point per line.

    Vectorized over offsets; the minimum of max(x(s), y(s)) over integer
    steps s along (a, b) is attained either at the feasibility edge (both
    coordinates moving the same way) or next to the crossing of x(s) = y(s)
    (coordinates moving oppositely; the max of two affine functions is
    convex, so flooring and ceiling the crossing suffices).
    """
    if (a, b) == (0, 1):
        return ks.copy()
    if (a, b) == (1, 0):
        return -ks
    g, u, v = _xgcd(b, a)
    x0 = u * ks
    y0 = -v * ks
    if a > 0:
        s = np.maximum(-((x0 - 1) // a), -((y0 - 1) // b))
        return np.maximum(x0 + s * a, y0 + s * b)
    lo = -((y0 - 1) // b)
    hi = (x0 - 1) // (-a)
    cross = (x0 - y0) // (b - a)
    best = None
    for cand in (cross, cross + 1):
        s = np.clip(cand, lo, hi)
        norm = np.maximum(x0 + s * a, y0 + s * b)
        best = norm if best is None else np.minimum(best, norm)
    return best


@dataclass(frozen=True)
class WeightRatioReport:
    """Largest normalized line weight over all families of the box.

    For each line the weight W is multiplied by the direction norm m and
    divided by c * (sqrt(T) - sqrt(max(s, 1) - 1)), s being the first shell
    the line meets.  Boundedness of the maximum over T is the per-line
    sanity behind the aggregated third-moment sums.
    """

    T: int
    c: float
    line_count: int
    max_ratio: float
    argmax_direction: tuple[int, int]
    argmax_offset: int


def weight_ratio_report(T: int, c: float) -> WeightRatioReport:
    _require_cap(T, ENUMERATION_CAP, "line family enumeration")
    if T < 1:
        raise ValueError("normalized weights need box exponent >= 1")
    if c <= 0:
        raise ValueError(f"sampling rate must be > 0, got {c}")
    n = 1 << T
    grids = _probability_grids(T, c)
    sqrt_t = math.sqrt(T)
    shell_of_norm = np.array(
        [v.bit_length() - 1 for v in range(1, n + 1)], dtype=np.int64
    )
    best = (-1.0, (0, 1), 0)
    line_count = 0
    for a, b in _box_directions(n):
        kmin, cnt, w1, _, _ = _direction_line_sums(n, a, b, grids)
        lines = np.nonzero(cnt >= 2)[0]
        if lines.size == 0:
            continue
        line_count += int(lines.size)
        ks = lines + kmin
        norms = _min_box_norm_for_offsets(n, a, b, ks)
        s = shell_of_norm[norms - 1]
        denom = c * (sqrt_t - np.sqrt(np.maximum(s, 1) - 1.0))
        ratios = w1[lines] * max(abs(a), b) / denom
        j = int(np.argmax(ratios))
        if float(ratios[j]) > best[0]:
            best = (float(ratios[j]), (a, b), int(ks[j]))
    return WeightRatioReport(
        T=T, c=c, line_count=line_count, max_ratio=best[0],
        argmax_direction=best[1], argmax_offset=best[2],
    )


def report_rows(reports: Iterable[object]) -> list[dict]:
    """Dataclass reports as plain dicts, ready for JSON or CSV."""
    rows = []
    for r in reports:
        d = asdict(r)
        rows.append(d)
    return rows


def rows_to_json(rows: list[dict]) -> str:
    return json.dumps(rows, sort_keys=True, indent=2) + "\n"


def rows_to_csv(rows: list[dict]) -> str:
    """One CSV row per report; columns in field order of the first row."""
    if not rows:
        return ""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(
            {k: json.dumps(v) if isinstance(v, (list, tuple)) else v for k, v in row.items()}
        )
    return buf.getvalue()
