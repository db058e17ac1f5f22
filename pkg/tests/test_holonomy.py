import math
from fractions import Fraction

import numpy as np
import pytest

from cocyclelab import (
    CocycleSpec,
    PLMap,
    SymbolicPoint,
    check_domination,
    compose,
    evaluate_generator,
    fb_family,
    holder_const_cocycle,
    holonomy_convergence_table,
    homoclinic_points,
    invert,
    stable_holonomy,
    uniform_distance,
    unstable_holonomy,
    verify_holonomy_axioms,
)
from cocyclelab.errors import NotDominated, NotStablePair
from cocyclelab.fixtures import (
    expanding_cocycle,
    pl_dominated_cocycle,
    rotation_cocycle,
    staircase_cocycle,
)
from cocyclelab.symbolic import MarkovMeasure, resample_past, sample_measure

from conftest import random_point


def constant_cocycle(space, m):
    return CocycleSpec(space, 0, {w: m for w in space.words(1)})


# ----------------------------------------------------------------- base cases


def test_constant_cocycle_gives_identity(full2):
    # blend toward the identity so the constant generator is dominated
    from cocyclelab import blend_with_identity

    c = constant_cocycle(full2, blend_with_identity(fb_family(Fraction(1, 4)), Fraction(1, 2)))
    x = SymbolicPoint.fixed(full2, 0)
    y = SymbolicPoint.make(full2, (0,), (1, 1), (0,), 0)
    res = stable_holonomy(c, x, y)
    assert res.map == PLMap.identity()
    assert res.error_bound == 0.0


def test_same_point_gives_identity(full2, rng):
    c = pl_dominated_cocycle(full2, 1, 0.4, seed=3)
    x = random_point(full2, rng)
    assert stable_holonomy(c, x, x).map == PLMap.identity()
    assert unstable_holonomy(c, x, x).map == PLMap.identity()


def test_rotation_angle_series_oracle(full2):
    c = rotation_cocycle(full2, 0, seed=8)
    x = SymbolicPoint.fixed(full2, 0)
    y = SymbolicPoint.make(full2, (1,), (1, 1, 0), (0,), -2)  # tail 0 from coord 1
    res = stable_holonomy(c, x, y)
    # closed form: finitely many non-zero terms of the angle series
    s = sum(
        evaluate_generator(c, x.shift(n)).angle - evaluate_generator(c, y.shift(n)).angle
        for n in range(0, 12)
    )
    assert res.map.is_rotation and res.map.angle == s % 1
    # unstable mirror over n <= 0: time-reversed pair sharing the backward tail
    y_u = SymbolicPoint.make(full2, (0,), (1, 1, 0), (1,), 1)
    res_u = unstable_holonomy(c, x, y_u)
    su = sum(
        evaluate_generator(c, y_u.shift(-n)).angle - evaluate_generator(c, x.shift(-n)).angle
        for n in range(1, 12)
    )
    assert res_u.map.angle == su % 1


def test_errors(full2):
    bad = expanding_cocycle(full2)
    x = SymbolicPoint.fixed(full2, 0)
    y = SymbolicPoint.make(full2, (0,), (1,), (0,), 0)
    with pytest.raises(NotDominated):
        stable_holonomy(bad, x, y)
    good = pl_dominated_cocycle(full2, 1, 0.4, seed=3)
    z = SymbolicPoint.fixed(full2, 1)
    with pytest.raises(NotStablePair):
        stable_holonomy(good, x, z)


def test_result_invariants(full2, rng):
    c = pl_dominated_cocycle(full2, 1, 0.4, seed=3)
    x0 = SymbolicPoint.fixed(full2, 0)
    for y in homoclinic_points(x0, 3)[:12]:
        res = stable_holonomy(c, x0, y)
        assert res.error_bound >= res.cauchy_tail
        assert 0 < res.gamma_bound < float(c.alpha)
        if y != x0:
            assert res.distance_alpha_ratio is not None


# --------------------------------------------------------------------- axioms


def test_axioms_trivial_cases(full2):
    from cocyclelab import blend_with_identity

    c = constant_cocycle(full2, blend_with_identity(fb_family(Fraction(1, 3)), Fraction(1, 2)))
    x = SymbolicPoint.fixed(full2, 0)
    rep = verify_holonomy_axioms(c, [(x, x, x)], tol=0)
    assert rep.passed and rep.max_composition_residual == 0


def test_axioms_rotation_triples(full2, rng):
    c = rotation_cocycle(full2, 1, seed=8)
    x0 = SymbolicPoint.fixed(full2, 0)
    pts = homoclinic_points(x0, 3)
    triples = [(pts[1], pts[5], pts[9]), (pts[0], pts[2], pts[17])]
    rep = verify_holonomy_axioms(c, triples, tol=1e-9)
    assert rep.passed


def test_axioms_pl_triples_both_sides(full2):
    c = pl_dominated_cocycle(full2, 1, 0.4, seed=3)
    x0 = SymbolicPoint.fixed(full2, 0)
    pts = homoclinic_points(x0, 3)
    triples = [(pts[2], pts[7], pts[11]), (pts[1], pts[3], pts[19])]
    for side in ("s", "u"):
        rep = verify_holonomy_axioms(c, triples, tol=1e-6, side=side)
        assert rep.passed, (side, rep)


def test_shifted_pair_consistency(full2):
    # h_{xy} equals the generator-conjugated holonomy of the shifted pair
    c = pl_dominated_cocycle(full2, 1, 0.4, seed=3)
    x0 = SymbolicPoint.fixed(full2, 0)
    y = homoclinic_points(x0, 3)[7]
    h = stable_holonomy(c, x0, y).map
    h_shift = stable_holonomy(c, x0.shift(1), y.shift(1)).map
    fy = evaluate_generator(c, y)
    fx = evaluate_generator(c, x0)
    lhs = compose(invert(fy), compose(h_shift, fx))
    assert float(uniform_distance(lhs, h)) <= 1e-12


# ----------------------------------------------------------- convergence table


def test_table_constant_cocycle_all_zero(full2):
    c = constant_cocycle(full2, fb_family(Fraction(1, 4)))  # table needs no domination
    x = SymbolicPoint.fixed(full2, 0)
    y = SymbolicPoint.make(full2, (0,), (1,), (0,), 0)
    table = holonomy_convergence_table(c, x, y, 10)
    assert all(inc == 0 for _, inc, _ in table.rows)
    assert table.decaying and table.slope is None


def test_table_staircase_rate(full2):
    theta = 0.4
    coc, x, y = staircase_cocycle(26, theta)
    table = holonomy_convergence_table(coc, x, y, 24)
    target = -theta * math.log(2)
    assert table.slope == pytest.approx(target, rel=0.15)
    assert table.decaying
    for _, inc, bound in table.rows:
        assert inc <= bound + 1e-12


def test_table_staircase_increment_oracle():
    # increments are exactly the encoded per-level angle gaps
    theta, amp = 0.4, 0.1
    coc, x, y = staircase_cocycle(12, theta, amp)
    table = holonomy_convergence_table(coc, x, y, 10)
    for n, inc, _ in table.rows:
        assert inc == pytest.approx(amp * 2 ** (-theta * n), abs=1e-12)


def test_table_non_dominated_flagged(full2):
    c = expanding_cocycle(full2, slope=4.0)
    x = SymbolicPoint.fixed(full2, 0)
    y = SymbolicPoint.make(full2, (0,), (1, 0, 1, 1, 0, 1), (0,), 0)
    table = holonomy_convergence_table(c, x, y, 5)
    assert not table.decaying


# --------------------------------------------------------- identity bound in C


def test_identity_distance_bound_fit_and_certify(full2):
    c = pl_dominated_cocycle(full2, 1, 0.4, seed=3)
    mu = MarkovMeasure.uniform(full2)
    rng = np.random.default_rng(17)
    ratios = []
    for x in sample_measure(mu, 100, seed=23, depth=24):
        y = resample_past(mu, x, rng, depth=16)
        res = stable_holonomy(c, x, y)
        if res.distance_alpha_ratio is not None:
            ratios.append(res.distance_alpha_ratio)
    assert len(ratios) >= 90
    fit, fresh = ratios[:50], ratios[50:]
    frozen = 1.15 * max(fit)
    assert max(fresh) <= frozen
    dom = check_domination(c)
    c_theory = holder_const_cocycle(c) * 2 ** (1 - dom.theta_s) / (1 - 2 ** (-dom.theta_s))
    assert max(ratios) <= c_theory
