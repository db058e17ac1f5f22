"""Measurable-conjugacy rigidity experiment.

A conjugacy given almost everywhere by a clean rule, corrupted on a finite
(hence null) set, is regularised back: values are transported from screened
anchor points along stable and unstable holonomy legs through local product
points.  The transported conjugacy ignores the corruption, satisfies the
cohomological equation, and its modulus of continuity is measured against the
product exponent beta * gamma.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .circlemaps import PLMap, compose, invert, uniform_distance
from .cocycles import CocycleSpec, check_bounded_distortion, check_domination
from .errors import DistortionUnbounded, InsufficientScales, MissingSample, NotDominated
from .holonomy import gamma_budget, stable_holonomy, unstable_holonomy
from .symbolic import (
    MarkovMeasure,
    SymbolicPoint,
    bracket,
    distance_exponent,
    is_stable_pair,
    sample_measure,
)
from .transfer import ResidualReport, TransferMap, holder_regression


@dataclass(frozen=True)
class WindowRule:
    """Locally constant conjugacy rule: phi depends on a centred window."""

    window: int
    table: dict

    def phi(self, y: SymbolicPoint) -> PLMap:
        w = self.window
        return self.table[y.window(-w, w + 1)]


@dataclass(eq=False)
class MeasurableConjugacy:
    """A conjugacy rule together with a finite set of corrupted values.

    The corruption set is finite, hence null for every non-atomic Markov
    measure; ``phi_at`` returns the corrupted value where one is installed.
    """

    rule: object  # WindowRule or TransferMap
    corruption: dict = field(default_factory=dict)

    def rule_value(self, y: SymbolicPoint) -> PLMap:
        if isinstance(self.rule, WindowRule):
            return self.rule.phi(y)
        return self.rule.phi_at(y)

    def phi_at(self, y: SymbolicPoint) -> PLMap:
        if y in self.corruption:
            return self.corruption[y]
        return self.rule_value(y)

    def is_corrupted(self, y: SymbolicPoint) -> bool:
        return y in self.corruption


def _screen_distortion(G: CocycleSpec, points, horizon: int):
    rep = check_bounded_distortion(G, horizon, points)
    if rep.growth_flagged:
        raise DistortionUnbounded(
            f"iterated slopes keep growing through horizon {horizon} (K_est={rep.K_est:.3g})"
        )
    return rep


def check_conj_hol_relation(
    phi: MeasurableConjugacy, F: CocycleSpec, G: CocycleSpec, pairs, tol: float = 1e-6,
    horizon: int = 12, skip_corrupted: bool = True,
) -> ResidualReport:
    """Residuals of h^{f}_{xy} = phi_y h^{g}_{xy} phi_x^{-1} along local pairs.

    The distortion of G is screened first over the sampled points.  Pairs
    touching the corruption set are skipped by default (the relation only
    holds off it); pass ``skip_corrupted=False`` to surface the violation a
    corrupted value produces.
    """
    if skip_corrupted:
        pairs = [(x, y) for x, y in pairs if not (phi.is_corrupted(x) or phi.is_corrupted(y))]
    else:
        pairs = list(pairs)
    pts = sorted({p for pair in pairs for p in pair}, key=SymbolicPoint.sort_key)
    _screen_distortion(G, pts, horizon)
    rows = []
    worst = 0.0
    for x, y in pairs:
        if is_stable_pair(x, y):
            hf = stable_holonomy(F, x, y).map
            hg = stable_holonomy(G, x, y).map
        else:
            hf = unstable_holonomy(F, x, y).map
            hg = unstable_holonomy(G, x, y).map
        rhs = compose(compose(phi.phi_at(y), hg), invert(phi.phi_at(x)))
        r = float(uniform_distance(hf, rhs))
        rows.append(((x, y), r))
        worst = max(worst, r)
    return ResidualReport(tuple(rows), worst, tol, worst <= tol)


@dataclass(frozen=True)
class HolderCheckReport:
    exponent: float
    constant: float
    fit_pairs: int
    fresh_pairs: int
    worst_fresh_ratio: float
    passed: bool
    chain_pairs: int = 0
    worst_chain_ratio: float = 0.0


def stable_pair_holder_check(
    phi: MeasurableConjugacy, F: CocycleSpec, pairs, tol: float = 1e-6,
    beta: float = 1.0, gamma: float | None = None, margin: float = 1.15,
    generic_pairs=(),
) -> HolderCheckReport:
    """Fit C with d(phi_x, phi_y) <= C d(x, y)**(beta*gamma) and freeze-validate.

    Ratios from the interleaved first half of the local pairs fit C; the
    frozen value (fixed safety margin) must dominate the second half.  Generic
    same-cylinder pairs are checked through their two product-point legs:
    d(phi_x, phi_y) <= C (d(x, z)**bg + d(z, y)**bg) with z the bracket point,
    which is how the local inequality extends off the stable/unstable sets.
    """
    if gamma is None:
        dom = check_domination(F)
        if not dom.su_dominated:
            raise NotDominated("holonomy exponent budget undefined without domination")
        gamma = gamma_budget(dom.theta_s, float(F.alpha))
    bg = beta * gamma
    rho = float(F.space.rho)
    ratios = []
    for x, y in pairs:
        if phi.is_corrupted(x) or phi.is_corrupted(y):
            continue
        n = distance_exponent(x, y)
        if n is None:
            continue
        r = float(uniform_distance(phi.phi_at(x), phi.phi_at(y)))
        ratios.append((n, r / rho ** (-n * bg)))
    if len({n for n, _ in ratios}) < 3:
        raise InsufficientScales("pairs span fewer than 3 distance scales")
    fit, fresh = ratios[0::2], ratios[1::2]  # interleave: both halves see all scales
    c_frozen = margin * max(r for _, r in fit)
    worst_fresh = max(r for _, r in fresh) if fresh else 0.0

    worst_chain = 0.0
    n_chain = 0
    for x, y in generic_pairs:
        if phi.is_corrupted(x) or phi.is_corrupted(y) or x[0] != y[0]:
            continue
        z = bracket(x, y)
        legs = 0.0
        for a, b in ((x, z), (z, y)):
            m = distance_exponent(a, b)
            if m is not None:
                legs += rho ** (-m * bg)
        if legs == 0.0:
            continue
        n_chain += 1
        r = float(uniform_distance(phi.phi_at(x), phi.phi_at(y)))
        worst_chain = max(worst_chain, r / legs)
    passed = worst_fresh <= c_frozen and worst_chain <= c_frozen
    return HolderCheckReport(
        bg, c_frozen, len(fit), len(fresh), worst_fresh, passed, n_chain, worst_chain
    )


@dataclass(frozen=True)
class RigidityReport:
    gamma: float
    beta_gamma: float
    regression: tuple | None
    repaired_points: tuple
    path_independence_worst: float
    cohomology_worst: float
    anchors_used: int
    anchors_excluded: int
    fiber_lipschitz_max: float

    def to_json(self) -> dict:
        return {
            "gamma": self.gamma,
            "beta_gamma": self.beta_gamma,
            "regression": list(self.regression) if self.regression else None,
            "repaired": [
                {"point": pt.to_json(), "change": d} for pt, d in self.repaired_points
            ],
            "path_independence_worst": self.path_independence_worst,
            "cohomology_worst": self.cohomology_worst,
            "anchors_used": self.anchors_used,
            "anchors_excluded": self.anchors_excluded,
            "fiber_lipschitz_max": self.fiber_lipschitz_max,
        }


def _transport(phi_anchor, F, G, a, t, tol):
    """Carry a conjugacy value from a to t through the local product point."""
    m = bracket(a, t)
    hf = stable_holonomy(F, a, m, tol).map
    hg = stable_holonomy(G, a, m, tol).map
    val = compose(compose(hf, phi_anchor), invert(hg))
    if m == t:
        return val
    hfu = unstable_holonomy(F, m, t, tol).map
    hgu = unstable_holonomy(G, m, t, tol).map
    return compose(compose(hfu, val), invert(hgu))


def _transport_flipped(phi_anchor, F, G, a, t, tol):
    """Unstable leg first, then stable: the other route through the bracket."""
    m = bracket(t, a)
    hfu = unstable_holonomy(F, a, m, tol).map
    hgu = unstable_holonomy(G, a, m, tol).map
    val = compose(compose(hfu, phi_anchor), invert(hgu))
    if m == t:
        return val
    hf = stable_holonomy(F, m, t, tol).map
    hg = stable_holonomy(G, m, t, tol).map
    return compose(compose(hf, val), invert(hg))


def regularize(
    phi: MeasurableConjugacy,
    F: CocycleSpec,
    G: CocycleSpec,
    sample_count: int,
    tol: float = 1e-6,
    mu: MarkovMeasure | None = None,
    seed: int = 7,
    horizon: int = 12,
    beta: float = 1.0,
    path_checks: int = 20,
):
    """Rebuild a conjugacy on a dense sample from screened anchors.

    Anchor candidates are measure samples plus the corrupted points; anchors
    whose local cohomological residual exceeds 10*tol are excluded.  Every
    target value is transported from the nearest clean anchor in its cylinder,
    so corrupted values are repaired.  Returns the transported conjugacy as a
    sample table plus a report with the moduli measured on it.
    """
    if mu is None:
        raise ValueError("a Markov measure is required for sampling")
    dom_f = check_domination(F)
    if not dom_f.su_dominated:
        raise NotDominated(f"first cocycle: theta = {dom_f.theta:.4f}")
    dom_g = check_domination(G)
    if not dom_g.su_dominated:
        raise NotDominated(f"second cocycle: theta = {dom_g.theta:.4f}")
    gamma = gamma_budget(dom_f.theta_s, float(F.alpha))

    anchors_raw = sample_measure(mu, sample_count, seed) + sorted(
        phi.corruption, key=SymbolicPoint.sort_key
    )
    _screen_distortion(G, anchors_raw[: min(len(anchors_raw), 24)], horizon)
    anchors = []
    excluded = 0
    for a in anchors_raw:
        lhs = F.generator(a)
        rhs = compose(compose(phi.phi_at(a.shift(1)), G.generator(a)), invert(phi.phi_at(a)))
        if float(uniform_distance(lhs, rhs)) <= 10 * tol:
            anchors.append(a)
        else:
            excluded += 1
    if not anchors:
        raise MissingSample("no anchor survived the residual screening")

    base_targets = list(dict.fromkeys(
        anchors + sample_measure(mu, max(8, sample_count // 2), seed + 1)
    ))
    base_targets += [t.shift(1) for t in base_targets]
    base_targets = list(dict.fromkeys(base_targets))
    extras = sorted(phi.corruption, key=SymbolicPoint.sort_key)
    extras += [t.shift(1) for t in extras]
    targets = list(dict.fromkeys(base_targets + extras))

    by_cyl = {}
    for a in anchors:
        by_cyl.setdefault(a[0], []).append(a)

    def anchor_for(t):
        pool = by_cyl.get(t[0])
        if not pool:
            raise MissingSample(f"no clean anchor shares the cylinder of {t}")
        def closeness(a):
            return math.inf if a == t else distance_exponent(a, t)
        return max(pool, key=lambda a: (closeness(a), a.sort_key()))

    tilde = {}
    for t in targets:
        a = anchor_for(t)
        if a == t:
            tilde[t] = phi.phi_at(a)
        else:
            tilde[t] = _transport(phi.phi_at(a), F, G, a, t, tol)

    repaired = tuple(
        (t, float(uniform_distance(tilde[t], phi.phi_at(t))))
        for t in sorted(phi.corruption, key=SymbolicPoint.sort_key)
    )

    path_worst = 0.0
    for t in targets[:path_checks]:
        a = anchor_for(t)
        if a == t:
            continue
        alt = _transport_flipped(phi.phi_at(a), F, G, a, t, tol)
        path_worst = max(path_worst, float(uniform_distance(tilde[t], alt)))

    coh_worst = 0.0
    for t in targets:
        s = t.shift(1)
        if s not in tilde:
            continue
        lhs = F.generator(t)
        rhs = compose(compose(tilde[s], G.generator(t)), invert(tilde[t]))
        coh_worst = max(coh_worst, float(uniform_distance(lhs, rhs)))

    # regress over the corruption-independent targets so the measured modulus
    # is comparable across runs with and without injected corruption
    try:
        regression = holder_regression(
            sorted(base_targets, key=SymbolicPoint.sort_key), tilde.__getitem__, float(F.space.rho)
        )
    except InsufficientScales:
        regression = None

    fiber = max(
        max(float(m.max_slope), 1.0 / float(m.min_slope)) for m in tilde.values()
    )
    out = TransferMap(
        F, G, anchors[0], 1, tilde, beta * gamma, tol,
        holder_estimate=regression, construction_residual=coh_worst, normalized=False,
    )
    report = RigidityReport(
        gamma, beta * gamma, regression, repaired, path_worst, coh_worst,
        len(anchors), excluded, fiber,
    )
    return out, report
