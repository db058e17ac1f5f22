"""Piecewise-linear orientation-preserving circle homeomorphisms.

Maps are stored through their degree-1 lifts: strictly increasing breakpoints
in [0, 1) and lift values at those breakpoints, with value(x+1) = value(x)+1.
Coordinates are either all Fractions (exact mode) or all floats; composition,
inversion and the metrics below are exact in exact mode.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import InvalidExponent, ResourceLimit

SEGMENT_EPS = 1e-14  # float mode: shorter segments are merged away
SLOPE_EPS = 1e-11  # float mode: slope changes below this are not breakpoints


def _coerce(values):
    vals = tuple(values)
    if any(isinstance(v, float) for v in vals):
        return tuple(float(v) for v in vals), False
    return tuple(Fraction(v) for v in vals), True


def circle_norm(t):
    """Distance from t to the nearest integer (arc distance on the circle)."""
    frac = t % 1
    return min(frac, 1 - frac)


def _contains_half_integer(a, b):
    lo, hi = (a, b) if a <= b else (b, a)
    first = math.ceil(2 * lo)
    if first % 2 == 0:
        first += 1
    return first <= math.floor(2 * hi)


@dataclass(frozen=True)
class PLMap:
    """Canonical PL circle homeomorphism (degree 1, positive slopes)."""

    breaks: tuple
    vals: tuple

    @classmethod
    def make(cls, breaks, vals) -> "PLMap":
        breaks, exact_b = _coerce(breaks)
        vals, exact_v = _coerce(vals)
        if not exact_b or not exact_v:
            breaks = tuple(float(b) for b in breaks)
            vals = tuple(float(v) for v in vals)
        if len(breaks) != len(vals) or not breaks:
            raise ValueError("breakpoints and values must be non-empty, equal length")
        if any(not (0 <= b < 1) for b in breaks):
            raise ValueError("breakpoints must lie in [0, 1)")
        if any(b2 <= b1 for b1, b2 in zip(breaks, breaks[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        exact = isinstance(breaks[0], Fraction)
        if not exact:
            breaks, vals = _drop_tiny_segments(breaks, vals)
        _check_increasing(breaks, vals)
        k = math.floor(vals[0])
        vals = tuple(v - k for v in vals)
        breaks, vals = _merge_collinear(breaks, vals, exact)
        if len(breaks) == 1:
            angle = (vals[0] - breaks[0]) % 1
            zero = Fraction(0) if exact else 0.0
            return cls((zero,), (angle,))
        return cls(breaks, vals)

    @classmethod
    def identity(cls) -> "PLMap":
        return cls((Fraction(0),), (Fraction(0),))

    @classmethod
    def rotation(cls, angle) -> "PLMap":
        angle, exact = _coerce([angle])
        zero = Fraction(0) if exact else 0.0
        return cls((zero,), (angle[0] % 1,))

    @property
    def is_exact(self) -> bool:
        return isinstance(self.breaks[0], Fraction)

    @property
    def is_rotation(self) -> bool:
        return len(self.breaks) == 1

    @property
    def angle(self):
        if not self.is_rotation:
            raise ValueError("not a rotation")
        return self.vals[0] % 1

    def segments(self):
        """(x1, x2, v1, slope) covering one period [b0, b0+1)."""
        cached = self.__dict__.get("_segments")
        if cached is not None:
            return cached
        b, v = self.breaks, self.vals
        m = len(b)
        out = []
        for i in range(m):
            x1, y1 = b[i], v[i]
            x2 = b[i + 1] if i + 1 < m else b[0] + 1
            y2 = v[i + 1] if i + 1 < m else v[0] + 1
            out.append((x1, x2, y1, (y2 - y1) / (x2 - x1)))
        object.__setattr__(self, "_segments", out)
        return out

    @property
    def slopes(self) -> tuple:
        return tuple(s for _, _, _, s in self.segments())

    @property
    def max_slope(self):
        return max(self.slopes)

    @property
    def min_slope(self):
        return min(self.slopes)

    def __call__(self, t):
        """Lift value at t; satisfies f(t+1) = f(t)+1."""
        b, v = self.breaks, self.vals
        m = len(b)
        k = math.floor(t - b[0])
        u = t - k  # in [b0, b0+1)
        i = bisect.bisect_right(b, u) - 1
        x1, y1 = b[i], v[i]
        x2 = b[i + 1] if i + 1 < m else b[0] + 1
        y2 = v[i + 1] if i + 1 < m else v[0] + 1
        return y1 + (u - x1) * (y2 - y1) / (x2 - x1) + k

    def to_json(self) -> dict:
        if self.is_exact:
            return {
                "breakpoints": [[b.numerator, b.denominator] for b in self.breaks],
                "values": [[v.numerator, v.denominator] for v in self.vals],
            }
        return {"breakpoints": list(self.breaks), "values": list(self.vals)}

    @classmethod
    def from_json(cls, doc: dict) -> "PLMap":
        def load(xs):
            return [
                Fraction(int(e[0]), int(e[1])) if isinstance(e, (list, tuple)) else float(e)
                for e in xs
            ]

        return cls.make(load(doc["breakpoints"]), load(doc["values"]))

    def __matmul__(self, other: "PLMap") -> "PLMap":
        return compose(self, other)


def _check_increasing(breaks, vals):
    for v1, v2 in zip(vals, vals[1:]):
        if v2 <= v1:
            raise ValueError("lift values must be strictly increasing")
    if vals[0] + 1 <= vals[-1]:
        raise ValueError("wrap segment must have positive slope")


def _drop_tiny_segments(breaks, vals):
    # absorb near-duplicate points (rounding noise); genuinely decreasing
    # values survive and are rejected by validation
    out_b, out_v = [breaks[0]], [vals[0]]
    for b, v in zip(breaks[1:], vals[1:]):
        if abs(b - out_b[-1]) < SEGMENT_EPS or abs(v - out_v[-1]) < SEGMENT_EPS:
            continue
        out_b.append(b)
        out_v.append(v)
    # wrap side: the last breakpoint must stay clear of b0 + 1
    while len(out_b) > 1 and (
        abs(out_b[0] + 1 - out_b[-1]) < SEGMENT_EPS or abs(out_v[0] + 1 - out_v[-1]) < SEGMENT_EPS
    ):
        out_b.pop()
        out_v.pop()
    return tuple(out_b), tuple(out_v)


def _merge_collinear(breaks, vals, exact):
    while len(breaks) > 1:
        m = len(breaks)
        slopes = PLMap(breaks, vals).slopes
        drop = None
        for i in range(m):
            s_in = slopes[i - 1]
            s_out = slopes[i]
            if exact:
                same = s_in == s_out
            else:
                same = abs(s_in - s_out) <= SLOPE_EPS * max(1.0, abs(s_in))
            if same:
                drop = i
                break
        if drop is None:
            return breaks, vals
        breaks = breaks[:drop] + breaks[drop + 1 :]
        vals = vals[:drop] + vals[drop + 1 :]
    return breaks, vals


def compose(outer: PLMap, inner: PLMap) -> PLMap:
    """outer after inner, exact: breakpoints are inner's plus inner-preimages of outer's."""
    if outer.is_rotation and inner.is_rotation:
        return PLMap.rotation(outer.vals[0] + inner.vals[0])
    cuts = set(inner.breaks)
    inv = invert(inner)
    for c in outer.breaks:
        u = inv(c)
        cuts.add(u - math.floor(u))
    breaks = sorted(cuts)
    vals = [outer(inner(x)) for x in breaks]
    return PLMap.make(breaks, vals)


def invert(f: PLMap) -> PLMap:
    """Exact inverse homeomorphism; slopes are reciprocals on image segments."""
    if f.is_rotation:
        return PLMap.rotation(-f.vals[0])
    pairs = []
    for x, v in zip(f.breaks, f.vals):
        k = math.floor(v)
        pairs.append((v - k, x - k))
    pairs.sort()
    return PLMap.make([p[0] for p in pairs], [p[1] for p in pairs])


def uniform_distance(f: PLMap, g: PLMap):
    """sup over the circle of the arc distance between f(p) and g(p); exact."""
    if f.is_rotation and g.is_rotation:
        return circle_norm(f.vals[0] - g.vals[0])
    pts = sorted(set(f.breaks) | set(g.breaks))
    diffs = [f(p) - g(p) for p in pts]
    best = max(circle_norm(d) for d in diffs)
    half = Fraction(1, 2) if (f.is_exact and g.is_exact) else 0.5
    ring = diffs + [diffs[0]]  # difference of lifts is 1-periodic
    for d1, d2 in zip(ring, ring[1:]):
        if _contains_half_integer(d1, d2):
            return half
    return best


def lipschitz_constant(f: PLMap):
    return f.max_slope


def lipschitz_seminorm_diff(f: PLMap, g: PLMap):
    """Lipschitz seminorm of the lift difference: max slope gap on the merged partition."""
    pts = sorted(set(f.breaks) | set(g.breaks))
    pts.append(pts[0] + 1)
    best = 0
    for p, q in zip(pts, pts[1:]):
        sf = (f(q) - f(p)) / (q - p)
        sg = (g(q) - g(p)) / (q - p)
        best = max(best, abs(sf - sg))
    return best


def lipschitz_metric(f: PLMap, g: PLMap):
    """Uniform distance plus Lipschitz seminorm of the difference."""
    return uniform_distance(f, g) + lipschitz_seminorm_diff(f, g)


@dataclass(frozen=True)
class MetricReport:
    d_inf: float
    lip_seminorm_diff: float
    d_1: float
    d_max: float


def metric_report(f: PLMap, g: PLMap) -> MetricReport:
    d_inf = uniform_distance(f, g)
    lip = lipschitz_seminorm_diff(f, g)
    d1_inv = lipschitz_metric(invert(f), invert(g))
    return MetricReport(d_inf, lip, d_inf + lip, max(d_inf + lip, d1_inv))


def holder_constant(f: PLMap, beta, tol: float = 1e-6, max_cells: int = 200_000):
    """Certified upper bound for sup d(f(p), f(q)) / d(p, q)**beta.

    For beta = 1 this is the exact maximal slope.  For beta < 1 a branch and
    bound over chord space returns a value that is >= the true supremum and
    <= the supremum + tol.
    """
    if not 0 < beta <= 1:
        raise InvalidExponent(f"beta must be in (0, 1], got {beta}")
    if beta == 1:
        return f.max_slope
    beta = float(beta)
    lmax = float(f.max_slope)
    lmin = float(f.min_slope)
    fl = PLMap.make([float(b) for b in f.breaks], [float(v) for v in f.vals])

    def num(p, t):
        d = (fl(p + t) - fl(p)) % 1
        return min(d, 1 - d)

    # candidate chords anchored at breakpoints give the initial lower bound
    lower = 0.0
    cands = list(fl.breaks) + [b + 0.5 for b in fl.breaks]
    for p in cands:
        for q in cands:
            t = (q - p) % 1
            if 0 < t <= 0.5:
                lower = max(lower, num(p, t) / t**beta)
    t_floor = min(0.5, (max(lower, 1e-12) / lmax) ** (1 / (1 - beta)))
    cells = [(0.0, 1.0, t_floor, 0.5)]
    processed = 0
    while cells:
        processed += 1
        if processed > max_cells:
            raise ResourceLimit("holder_constant refinement exceeded cell cap")
        p1, p2, t1, t2 = cells.pop()
        delta_ub = (fl(p1 + t2) - fl(p1)) + (lmax - lmin) * (p2 - p1)
        ub = min(0.5, delta_ub) / t1**beta
        if ub <= lower + tol:
            continue
        pm, tm = 0.5 * (p1 + p2), 0.5 * (t1 + t2)
        for p, t in ((p1, t1), (p1, tm), (pm, t1), (pm, tm), (p2, t2), (pm, t2), (p1, t2), (p2, t1)):
            if 0 < t <= 0.5:
                lower = max(lower, num(p, t) / t**beta)
        if p2 - p1 >= t2 - t1:
            cells.append((p1, pm, t1, t2))
            cells.append((pm, p2, t1, t2))
        else:
            cells.append((p1, p2, t1, tm))
            cells.append((p1, p2, tm, t2))
    return lower + tol


def blend_with_identity(f: PLMap, t) -> PLMap:
    """Convex combination of the lift with the identity lift; t=1 gives the identity."""
    if not 0 <= t <= 1:
        raise ValueError("t must be in [0, 1]")
    return PLMap.make(f.breaks, [(1 - t) * v + t * b for b, v in zip(f.breaks, f.vals)])


def fb_family(b) -> PLMap:
    """Three-slope homeomorphism family indexed by b in (0, 1/2).

    Slopes 3/2 on (0, b), 1/2 on (b, 1/2) and (3-4b)/2 on (1/2, 1); fixes 0.
    Any two distinct members differ by Lipschitz seminorm 1, which makes the
    family a standing witness that the Lipschitz metric is non-separable.
    """
    b = Fraction(b) if not isinstance(b, float) else b
    if not 0 < b < Fraction(1, 2):
        raise ValueError("b must lie in (0, 1/2)")
    half = Fraction(1, 2) if not isinstance(b, float) else 0.5
    three_half = Fraction(3, 2) if not isinstance(b, float) else 1.5
    return PLMap.make((0, b, half), (0, three_half * b, half * half + b))
