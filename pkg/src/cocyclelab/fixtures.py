"""Deterministic fixture builders shared by tests, experiments and the CLI.

Everything is seeded; rational fixtures use small denominators so that exact
pipelines (rotation families, the three-slope family) stay fast.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .circlemaps import PLMap, compose, invert
from .cocycles import CocycleSpec
from .errors import ParamError
from .rigidity import MeasurableConjugacy, WindowRule
from .symbolic import SFTSpace, SymbolicPoint


def random_fraction(rng, denom: int = 64) -> Fraction:
    return Fraction(int(rng.integers(0, denom)), denom)


def random_plmap(rng, n_breaks: int = 4, exact: bool = True, denom: int = 64) -> PLMap:
    """Random PL circle homeomorphism with ``n_breaks`` breakpoints."""
    if n_breaks < 1:
        raise ValueError("need at least one breakpoint")
    idx = sorted(rng.choice(denom, size=n_breaks, replace=False))
    if exact:
        breaks = [Fraction(int(i), denom) for i in idx]
        weights = [int(rng.integers(1, 16)) for _ in range(n_breaks)]
        total = sum(weights)
        v0 = random_fraction(rng, denom)
        vals = [v0]
        for w in weights[:-1]:
            vals.append(vals[-1] + Fraction(w, total))
    else:
        breaks = [i / denom for i in idx]
        weights = rng.integers(1, 16, size=n_breaks).astype(float)
        weights /= weights.sum()
        v0 = float(rng.integers(0, denom)) / denom
        vals = [v0]
        for w in weights[:-1]:
            vals.append(vals[-1] + w)
    return PLMap.make(breaks, vals)


def near_identity_plmap(rng, n_breaks: int = 4, dev: float = 0.3, exact: bool = True,
                        denom: int = 64) -> PLMap:
    """Random homeomorphism with every slope inside [1-dev, 1+dev]."""
    idx = sorted(rng.choice(denom, size=n_breaks, replace=False))
    breaks = [Fraction(int(i), denom) for i in idx]
    gaps = [b2 - b1 for b1, b2 in zip(breaks, breaks[1:])] + [breaks[0] + 1 - breaks[-1]]
    dev_frac = Fraction(int(dev * 4096), 4096)  # round down: keeps the slope band
    amp = min(gaps) * dev_frac / 2
    offsets = [amp * Fraction(int(rng.integers(-denom, denom + 1)), denom) for _ in idx]
    vals = [b + e for b, e in zip(breaks, offsets)]
    if not exact:
        breaks = [float(b) for b in breaks]
        vals = [float(v) for v in vals]
    return PLMap.make(breaks, vals)


def rotation_cocycle(space: SFTSpace, window: int, seed: int, denom: int = 360) -> CocycleSpec:
    """Rotation-valued generator table with exact rational angles."""
    rng = np.random.default_rng(seed)
    table = {
        w: PLMap.rotation(random_fraction(rng, denom)) for w in space.words(2 * window + 1)
    }
    return CocycleSpec(space, window, table)


def pl_dominated_cocycle(
    space: SFTSpace, window: int, theta: float, seed: int, n_breaks: int = 4,
    exact: bool = True,
) -> CocycleSpec:
    """PL generator table with all slopes strictly inside the domination band
    (rho**-(alpha-theta), rho**(alpha-theta)) for alpha = 1."""
    band = float(space.rho) ** (1.0 - theta)
    if band <= 1:
        raise ParamError("theta must be < alpha for a non-empty band")
    dev = 0.98 * (1.0 - 1.0 / band)
    rng = np.random.default_rng(seed)
    table = {
        w: near_identity_plmap(rng, n_breaks, dev, exact)
        for w in space.words(2 * window + 1)
    }
    return CocycleSpec(space, window, table)


def expanding_cocycle(space: SFTSpace, slope: float = 4.0) -> CocycleSpec:
    """Window-0 cocycle violating domination: one slope equals ``slope``.

    Generators differ across symbols by a rotation so that fibre differences
    along an orbit get amplified rather than cancelling.
    """
    run = 0.8 / (slope - 0.25)
    m = PLMap.make((0.0, run), (0.0, slope * run))
    table = {
        w: m if w[0] % 2 == 0 else compose(m, PLMap.rotation(0.3)) for w in space.words(1)
    }
    return CocycleSpec(space, 0, table)


def telescoping_cocycle(space: SFTSpace) -> CocycleSpec:
    """Window-0 pair m, m^-1: products along alternating orbits telescope."""
    m = PLMap.make((Fraction(0), Fraction(2, 5)), (Fraction(0), Fraction(3, 5)))
    table = {}
    for w in space.words(1):
        table[w] = m if w[0] % 2 == 0 else invert(m)
    return CocycleSpec(space, 0, table)


def decaying_rotation_rule(
    space: SFTSpace, window: int, amp: Fraction = Fraction(1, 20)
) -> WindowRule:
    """Window rule of rotations whose coordinate weights decay like rho**-|m|."""
    rho = space.rho
    if not isinstance(rho, int):
        raise ParamError("decaying amplitudes need an integer rho")
    weights = {m: amp / Fraction(rho) ** abs(m) for m in range(-window, window + 1)}
    table = {}
    for w in space.words(2 * window + 1):
        angle = sum(weights[m] * w[m + window] for m in range(-window, window + 1))
        table[w] = PLMap.rotation(angle)
    return WindowRule(window, table)


def conjugated_pair(F: CocycleSpec, psi: WindowRule) -> CocycleSpec:
    """The cocycle G_x = psi(sigma x)^-1 f_x psi(x), tabulated exactly."""
    space = F.space
    wf, wp = F.window, psi.window
    wg = max(wf, wp + 1)
    table = {}
    for v in space.words(2 * wg + 1):
        f = F.table[v[wg - wf : wg + wf + 1]]
        p0 = psi.table[v[wg - wp : wg + wp + 1]]
        p1 = psi.table[v[wg + 1 - wp : wg + 2 + wp]]
        table[v] = compose(invert(p1), compose(f, p0))
    return CocycleSpec(space, wg, table)


def rotation_conjugacy_rule(psi: WindowRule, x0: SymbolicPoint) -> WindowRule:
    """Ground-truth conjugacy phi_y = psi_y psi_{x0}^-1 as a window rule."""
    base = invert(psi.phi(x0))
    return WindowRule(psi.window, {w: compose(m, base) for w, m in psi.table.items()})


def corrupted_conjugacy(
    rule: WindowRule, points, seed: int, magnitude=Fraction(1, 8)
) -> MeasurableConjugacy:
    """Override the rule at finitely many points by extra rotations."""
    rng = np.random.default_rng(seed)
    corruption = {}
    for pt in points:
        offset = magnitude + random_fraction(rng, 64) * magnitude
        corruption[pt] = compose(PLMap.rotation(offset), rule.phi(pt))
    return MeasurableConjugacy(rule, corruption)


def staircase_space(levels: int) -> SFTSpace:
    """Terminal symbol 0 plus two parallel ladders a_0..a_L and b_0..b_L."""
    k = 2 * (levels + 1) + 1
    P = [[0] * k for _ in range(k)]
    a = lambda j: 1 + j
    b = lambda j: 1 + (levels + 1) + j
    P[0][0] = 1
    P[0][a(0)] = 1
    P[0][b(0)] = 1
    for j in range(levels):
        P[a(j)][a(j + 1)] = 1
        P[b(j)][b(j + 1)] = 1
    P[a(levels)][0] = 1
    P[b(levels)][0] = 1
    return SFTSpace(k, tuple(map(tuple, P)))


def staircase_cocycle(levels: int, theta: float = 0.4, amp: float = 0.1):
    """Window-1 su-dominated PL cocycle saturating the theta decay rate.

    The two ladders carry rotations whose angle gap at level j is
    amp * rho**(-theta j); the terminal symbol carries a PL map whose inverse
    slope meets rho**(alpha - theta) exactly.  Returns (cocycle, x, y) where
    x, y are the two ladder points: a stable pair whose holonomy increments
    decay at exactly the domination rate.
    """
    space = staircase_space(levels)
    rho = float(space.rho)
    lo = rho ** (-(1.0 - theta))
    p = 0.6
    anchor = PLMap.make((0.0, p), (0.0, lo * p))
    base_angle = 0.15
    table = {}
    for w in space.words(3):
        c = w[1]
        if c == 0:
            table[w] = anchor
        else:
            j = (c - 1) % (levels + 1)
            track_a = c <= levels + 1
            angle = base_angle + (amp * rho ** (-theta * j) if track_a else 0.0)
            table[w] = PLMap.rotation(angle)
    coc = CocycleSpec(space, 1, table)
    a_core = tuple(1 + j for j in range(levels + 1))
    b_core = tuple(1 + (levels + 1) + j for j in range(levels + 1))
    x = SymbolicPoint.make(space, (0,), a_core, (0,), 0)
    y = SymbolicPoint.make(space, (0,), b_core, (0,), 0)
    return coc, x, y


def perturb_one_entry(c: CocycleSpec, angle=Fraction(1, 100)) -> CocycleSpec:
    """Copy of the cocycle with the first table word composed with a rotation."""
    word = sorted(c.table)[0]
    table = dict(c.table)
    table[word] = compose(PLMap.rotation(angle), table[word])
    return CocycleSpec(c.space, c.window, table, c.alpha)
