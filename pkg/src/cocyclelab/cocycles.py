"""Cocycles of PL circle homeomorphisms over a shift, as finite-window tables.

A generator assigns a fibre map to every admissible word of length 2w+1; the
value at a point is the table entry of its centred window.  Locally constant
generators are Holder for every exponent and make the regularity constants
below exactly computable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .circlemaps import PLMap, compose, invert, lipschitz_metric
from .errors import ResourceLimit
from .symbolic import SFTSpace, SymbolicPoint

BREAKPOINT_CAP = 100_000


@dataclass(frozen=True, eq=False)
class CocycleSpec:
    space: SFTSpace
    window: int
    table: dict
    alpha: float | Fraction = 1

    def __post_init__(self):
        if self.window < 0:
            raise ValueError("window must be >= 0")
        if not 0 < self.alpha <= 1:
            raise ValueError("alpha must lie in (0, 1]")
        want = set(self.space.words(2 * self.window + 1))
        have = set(self.table)
        if want != have:
            missing = sorted(want - have)[:3]
            extra = sorted(have - want)[:3]
            raise ValueError(f"table mismatch; missing={missing} extra={extra}")
        object.__setattr__(self, "_cache", {})

    def generator(self, x: SymbolicPoint) -> PLMap:
        w = self.window
        return self.table[x.window(-w, w + 1)]

    def to_json(self) -> dict:
        sep = "" if self.space.k <= 10 else ","
        return {
            "window": self.window,
            "alpha": float(self.alpha),
            "table": {
                sep.join(str(s) for s in word): m.to_json() for word, m in sorted(self.table.items())
            },
        }

    @classmethod
    def from_json(cls, space: SFTSpace, doc: dict) -> "CocycleSpec":
        table = {}
        for key, m in doc["table"].items():
            word = tuple(int(s) for s in (key.split(",") if "," in key else key))
            table[word] = PLMap.from_json(m)
        return cls(space, int(doc["window"]), table, doc.get("alpha", 1))


def evaluate_generator(c: CocycleSpec, x: SymbolicPoint) -> PLMap:
    return c.generator(x)


def iterate(c: CocycleSpec, x: SymbolicPoint, n: int, cap: int = BREAKPOINT_CAP) -> PLMap:
    """n-step fibre composition; negative n uses the inverse-iterate convention
    f^n_x = (f^{|n|} at sigma^n(x))^{-1}, the unique one satisfying the cocycle law."""
    if n == 0:
        return PLMap.identity()
    if n < 0:
        return invert(iterate(c, x.shift(n), -n, cap))
    h = c.generator(x)
    for j in range(1, n):
        h = compose(c.generator(x.shift(j)), h)
        if len(h.breaks) > cap:
            raise ResourceLimit(f"composition exceeded {cap} breakpoints")
    return h


def holder_const_cocycle(c: CocycleSpec) -> float:
    """Exact sup of d_1(f_x, f_y) / d(x, y)**alpha over distinct points.

    The sup is attained among table-word pairs grouped by their centred
    agreement radius, so the computation is finite.  Exactness assumes every
    admissible word occurs in some point (true whenever every symbol has a
    predecessor); otherwise the value is still a valid upper bound.
    """
    if "holder" in c._cache:
        return c._cache["holder"]
    rho = float(c.space.rho)
    alpha = float(c.alpha)
    words = sorted(c.table)
    w = c.window
    best = 0.0
    for i, u in enumerate(words):
        for v in words[i + 1 :]:
            r = 0
            while r <= w and u[w + r] == v[w + r] and u[w - r] == v[w - r]:
                r += 1
            # u, v agree on |m| < r and are realised by points at distance rho**-r
            d1 = float(lipschitz_metric(c.table[u], c.table[v]))
            best = max(best, d1 * rho ** (alpha * r))
    c._cache["holder"] = best
    return best


@dataclass(frozen=True)
class DominationReport:
    theta_s: float
    theta_u: float
    su_dominated: bool
    witness_words: dict
    n_step_ok: bool | None = None

    @property
    def theta(self) -> float:
        return min(self.theta_s, self.theta_u)


def check_domination(
    c: CocycleSpec, samples=(), horizon: int = 12
) -> DominationReport:
    """Margins theta = alpha - log_rho(extremal slope) for the generator table.

    When sample points are supplied, the derived n-step bound
    L((f^n_x)^-1) <= rho**(n (alpha - theta_s)) is also checked up to the horizon.
    """
    if not samples and "dom" in c._cache:
        return c._cache["dom"]
    rho = float(c.space.rho)
    alpha = float(c.alpha)
    l_max, w_u = max((float(m.max_slope), w) for w, m in c.table.items())
    linv_max, w_s = max((1.0 / float(m.min_slope), w) for w, m in c.table.items())
    theta_u = alpha - math.log(l_max) / math.log(rho)
    theta_s = alpha - math.log(linv_max) / math.log(rho)
    n_step_ok = None
    if samples:
        n_step_ok = True
        for x in samples:
            h = PLMap.identity()
            for n in range(1, horizon + 1):
                h = compose(c.generator(x.shift(n - 1)), h)
                bound = rho ** (n * (alpha - theta_s)) * (1 + 1e-9)
                if 1.0 / float(h.min_slope) > bound:
                    n_step_ok = False
    report = DominationReport(
        theta_s,
        theta_u,
        theta_s > 0 and theta_u > 0,
        {"u": w_u, "s": w_s},
        n_step_ok,
    )
    if not samples:
        c._cache["dom"] = report
    return report


@dataclass(frozen=True)
class DistortionReport:
    K_est: float
    horizon: int
    certified: bool
    per_step_max: tuple[float, ...] = ()
    growth_flagged: bool = False


def check_bounded_distortion(
    c: CocycleSpec, horizon: int, samples, cap: int = BREAKPOINT_CAP
) -> DistortionReport:
    """Empirical distortion bound max(L(f^n_x), L((f^n_x)^-1)) over the samples.

    ``certified`` is True exactly when every generator is a rotation, in which
    case all compositions are isometries.  A positive fitted growth rate of
    the per-step maxima flags distortion that keeps increasing through the
    horizon.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    samples = list(samples)
    per_step = [1.0] * horizon
    for x in samples:
        h = None
        for n in range(1, horizon + 1):
            g = c.generator(x.shift(n - 1))
            h = g if h is None else compose(g, h)
            if len(h.breaks) > cap:
                raise ResourceLimit(f"composition exceeded {cap} breakpoints")
            val = max(float(h.max_slope), 1.0 / float(h.min_slope))
            per_step[n - 1] = max(per_step[n - 1], val)
    k_est = max(per_step) if samples else 1.0
    certified = all(m.is_rotation for m in c.table.values())
    growth = False
    if not certified and horizon >= 4 and k_est > 1.0:
        import numpy as np

        logs = np.log(np.maximum(per_step, 1.0))
        slope = np.polyfit(range(1, horizon + 1), logs, 1)[0]
        growth = bool(slope > 1e-3)
    return DistortionReport(k_est, horizon, certified, tuple(per_step), growth)


@dataclass(frozen=True)
class PowerCocycle:
    """Time-n0 cocycle over sigma**n0, evaluated through the base table."""

    base: CocycleSpec
    n0: int

    def __post_init__(self):
        if self.n0 < 1:
            raise ValueError("n0 must be >= 1")

    @property
    def space(self) -> SFTSpace:
        return self.base.space

    @property
    def window(self) -> int:
        return self.base.window + self.n0 - 1

    @property
    def alpha(self):
        return self.base.alpha

    def generator(self, x: SymbolicPoint) -> PLMap:
        return iterate(self.base, x, self.n0)

    def iterate(self, x: SymbolicPoint, k: int) -> PLMap:
        return iterate(self.base, x, k * self.n0)


def power_domination(c: CocycleSpec, n0: int) -> DominationReport:
    """Domination margins of the time-n0 cocycle, measured against rho**n0."""
    if n0 == 1:
        return check_domination(c)
    key = ("powdom", n0)
    if key in c._cache:
        return c._cache[key]
    rho_eff = float(c.space.rho) ** n0
    alpha = float(c.alpha)
    w = c.window
    l_max, linv_max = 1.0, 1.0
    w_u = w_s = None
    for word in c.space.words(2 * w + n0):
        h = None
        for j in range(n0):
            g = c.table[word[j : j + 2 * w + 1]]
            h = g if h is None else compose(g, h)
        if float(h.max_slope) > l_max:
            l_max, w_u = float(h.max_slope), word
        if 1.0 / float(h.min_slope) > linv_max:
            linv_max, w_s = 1.0 / float(h.min_slope), word
    theta_u = alpha - math.log(l_max) / math.log(rho_eff)
    theta_s = alpha - math.log(linv_max) / math.log(rho_eff)
    report = DominationReport(theta_s, theta_u, theta_s > 0 and theta_u > 0, {"u": w_u, "s": w_s})
    c._cache[key] = report
    return report
