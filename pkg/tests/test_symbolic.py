from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cocyclelab import (
    MarkovMeasure,
    PseudoOrbit,
    SFTSpace,
    SymbolicPoint,
    bracket,
    closing_point,
    distance,
    distance_exponent,
    fixed_point_count,
    homoclinic_points,
    periodic_points,
    resample_future,
    resample_past,
    sample_measure,
    verify_closing_bound,
)
from cocyclelab.errors import CylinderMismatch, InadmissibleLoop, NotStablePair
from cocyclelab.symbolic import stable_agreement_onset, unstable_agreement_onset

from conftest import random_point


# ---------------------------------------------------------------- construction


def test_space_validation():
    with pytest.raises(ValueError):
        SFTSpace(2, ((0, 0), (1, 1)))  # null row
    with pytest.raises(ValueError):
        SFTSpace(2, ((1, 1), (1, 1)), rho=1)
    with pytest.raises(ValueError):
        SFTSpace(1, ((1,),))


def test_inadmissible_point_rejected(golden):
    with pytest.raises(ValueError):
        SymbolicPoint.make(golden, (0,), (1, 1), (0,), 0)
    with pytest.raises(ValueError):
        SymbolicPoint.periodic(golden, (1,))  # 11 forbidden


def test_canonical_equality_matches_coordinates(full2, golden, rng):
    # canonical-form equality must coincide with coordinatewise agreement
    for space in (full2, golden):
        pts = [random_point(space, rng) for _ in range(60)]
        for i, x in enumerate(pts):
            for y in pts[i + 1 :]:
                window_eq = x.window(-40, 41) == y.window(-40, 41)
                assert (x == y) == window_eq


def test_canonical_junction_representations_collapse(full2):
    # ...000|111... written with different junction bookkeeping
    a = SymbolicPoint.make(full2, (0,), (), (1,), 0)
    b = SymbolicPoint.make(full2, (0,), (0, 1), (1,), -1)
    c = SymbolicPoint.make(full2, (0, 0), (), (1, 1), 0)
    assert a == b == c
    # a fully periodic point handed over as a splice: x_n = (0,1)[n mod 2]
    p = SymbolicPoint.make(full2, (1, 0), (), (1, 0), 1)
    assert p.is_periodic and p.period == 2
    assert p == SymbolicPoint.periodic(full2, (0, 1))


# ----------------------------------------------------------------------- shift


def test_shift_fixed_point(full2):
    x = SymbolicPoint.fixed(full2, 0)
    assert x.shift(5) == x


def test_shift_two_periodic(full2):
    x = SymbolicPoint.periodic(full2, (0, 1))
    y = x.shift(1)
    assert y[0] == 1 and y == SymbolicPoint.periodic(full2, (1, 0))


def test_shift_core_bookkeeping(full2):
    x = SymbolicPoint.make(full2, (0,), (1,), (0,), 0)
    y = x.shift(3)
    # oracle: direct index arithmetic on materialised windows
    assert y.window(-6, 7) == tuple(x[n + 3] for n in range(-6, 7))
    assert y[-3] == 1 and y.shift(-3) == x


@given(st.integers(-9, 9), st.integers(-9, 9))
@settings(max_examples=40, deadline=None)
def test_shift_group_action(n, m):
    space = SFTSpace.full_shift(2)
    x = SymbolicPoint.make(space, (0,), (1, 1, 0, 1), (0, 1), 0)
    assert x.shift(n).shift(m) == x.shift(n + m)
    assert x.shift(n).shift(-n) == x


# -------------------------------------------------------------------- distance


def test_distance_identity(full2):
    x = SymbolicPoint.fixed(full2, 0)
    assert distance(x, x) == 0


def test_distance_disagree_at_zero(full2):
    x = SymbolicPoint.fixed(full2, 0)
    y = SymbolicPoint.fixed(full2, 1)
    assert distance(x, y) == 1


def test_distance_oracle(full2):
    x = SymbolicPoint.fixed(full2, 0)
    y = SymbolicPoint.make(full2, (0,), (1,), (0,), 3)
    # oracle: compare coordinates one by one
    n = 0
    while x[n] == y[n] and x[-n] == y[-n]:
        n += 1
    assert n == 3
    assert distance(x, y) == 2 ** (-3) == 0.125


def test_distance_scales_with_rho():
    space = SFTSpace.full_shift(2, rho=Fraction(3, 1))
    x = SymbolicPoint.fixed(space, 0)
    y = SymbolicPoint.make(space, (0,), (1,), (0,), 2)
    assert distance(x, y) == Fraction(1, 9)


def test_ultrametric_and_expansivity(full2, rng):
    pts = [random_point(full2, rng) for _ in range(25)]
    rho = float(full2.rho)
    for x in pts:
        for y in pts:
            for z in pts:
                assert distance(x, z) <= max(distance(x, y), distance(y, z)) + 1e-15
    for x in pts:
        for y in pts:
            if x == y:
                continue
            n = distance_exponent(x, y)
            # expansivity: shifting the first disagreement to the origin
            assert distance(x.shift(n), y.shift(n)) == 1 or distance(x.shift(-n), y.shift(-n)) == 1
            assert distance(x.shift(1), y.shift(1)) <= rho * distance(x, y) + 1e-15


# --------------------------------------------------------------------- bracket


def test_bracket_idempotent(full2, rng):
    x = random_point(full2, rng)
    assert bracket(x, x) == x


def test_bracket_splice_examples(full2):
    y = SymbolicPoint.fixed(full2, 0)
    z = SymbolicPoint.make(full2, (1,), (0,), (0,), 0)  # ...111 0 000...
    assert bracket(y, z) == z  # z already agrees with y on n >= 0
    y2 = SymbolicPoint.make(full2, (0,), (1,), (0,), 0)
    z2 = SymbolicPoint.periodic(full2, (1,))
    w = bracket(y2, z2)
    assert w.window(-3, 4) == (1, 1, 1, 1, 0, 0, 0)


def test_bracket_membership(full2, golden, rng):
    for space in (full2, golden):
        for _ in range(40):
            y, z = random_point(space, rng), random_point(space, rng)
            if y[0] != z[0]:
                with pytest.raises(CylinderMismatch):
                    bracket(y, z)
                continue
            w = bracket(y, z)
            assert w.window(0, 30) == y.window(0, 30)
            assert w.window(-30, 1) == z.window(-30, 1)


# ------------------------------------------------------------- periodic points


def test_periodic_points_full_shift(full2):
    pts = periodic_points(full2, 1)
    assert pts == [SymbolicPoint.fixed(full2, 0), SymbolicPoint.fixed(full2, 1)]
    pts2 = periodic_points(full2, 2)
    assert len(pts2) == 4  # trace(P^2) = 4 fixed points of sigma^2


def test_periodic_points_no_fixed_point():
    flip = SFTSpace(2, ((0, 1), (1, 0)))
    assert periodic_points(flip, 1) == []
    assert len(periodic_points(flip, 2)) == 2


@pytest.mark.parametrize("name", ["full2", "golden"])
def test_periodic_counts_match_trace(name, full2, golden):
    space = full2 if name == "full2" else golden
    pts = periodic_points(space, 8)
    for n in range(1, 9):
        count = sum(1 for p in pts if n % p.period == 0)
        assert count == fixed_point_count(space, n)


# ------------------------------------------------------------------ homoclinic


def test_homoclinic_empty_core(full2):
    x0 = SymbolicPoint.fixed(full2, 0)
    assert homoclinic_points(x0, 0) == [x0]


def test_homoclinic_core_one(full2):
    x0 = SymbolicPoint.fixed(full2, 0)
    pts = homoclinic_points(x0, 1)
    expect = {
        x0,
        SymbolicPoint.make(full2, (0,), (1,), (0,), -1),
        SymbolicPoint.make(full2, (0,), (1,), (0,), 0),
    }
    assert set(pts) == expect


def test_homoclinic_golden_isolated_ones(golden):
    x0 = SymbolicPoint.fixed(golden, 0)
    pts = homoclinic_points(x0, 2)
    for y in pts:
        w = y.window(-4, 4)
        assert (1, 1) not in tuple(zip(w, w[1:]))
    # oracle: admissible fillings of the window [-2, 2) with <= 2 ones
    assert len(pts) == 8


def test_homoclinic_points_are_asymptotic(full2, golden):
    for space, core in ((full2, 3), (golden, 4)):
        x0 = SymbolicPoint.fixed(space, 0)
        for y in homoclinic_points(x0, core):
            assert stable_agreement_onset(y, x0) <= core
            assert unstable_agreement_onset(y, x0) <= core + 1


def test_homoclinic_w_set_variant(golden):
    x0 = SymbolicPoint.periodic(golden, (0, 1))
    pts = homoclinic_points(x0, 4, variant="w_set")
    left_ref = x0.shift(1)
    for y in pts:
        stable_agreement_onset(y, x0)
        unstable_agreement_onset(y, left_ref)
    assert len(pts) > 0


# --------------------------------------------------------------------- closing


def test_closing_periodic_point_is_fixed(full2):
    y = SymbolicPoint.periodic(full2, (0, 1, 1, 0, 1, 0))
    assert closing_point(y, 3) == y


def test_closing_word_extraction(full2):
    y = SymbolicPoint.make(full2, (0,), (1,), (0,), 0)
    z = closing_point(y, 3)
    # oracle: repeating word y_-3..y_2 anchored in place
    assert z.window(-3, 3) == y.window(-3, 3)
    assert z.shift(6) == z
    assert z.window(-3, 9) == y.window(-3, 3) * 2


def test_closing_inadmissible_loop(golden):
    y = SymbolicPoint.make(golden, (0,), (1, 0, 0, 1), (0,), -2)
    # y_{n-1} = 1 and y_{-n} = 1 for n = 2
    assert y[1] == 1 and y[-2] == 1
    with pytest.raises(InadmissibleLoop):
        closing_point(y, 2)


def test_closing_bound_exact(full2, golden):
    for space, core in ((full2, 3), (golden, 4)):
        x0 = SymbolicPoint.fixed(space, 0)
        for y in homoclinic_points(x0, core)[:40]:
            for n in (2, 3, 4):
                try:
                    rows, ok = verify_closing_bound(y, n)
                except InadmissibleLoop:
                    continue
                assert ok, (y, n, rows)


def test_pseudo_orbit_loop(full2):
    y = SymbolicPoint.make(full2, (0,), (1,), (0,), 0)
    po = PseudoOrbit.closing_loop(y, 3)
    assert len(po.points) == 7
    assert po.eps == distance(y.shift(3), y.shift(-3))
    with pytest.raises(ValueError):
        PseudoOrbit((y, y.shift(5)), 1e-9)


# -------------------------------------------------------------------- measures


def test_markov_uniform_stationary(golden):
    mu = MarkovMeasure.uniform(golden)
    pi = np.array(mu.pi)
    Q = np.array(mu.Q)
    assert np.allclose(pi @ Q, pi)
    assert abs(sum(mu.pi) - 1) < 1e-12
    # oracle: stationary vector of [[1/2,1/2],[1,0]] is (2/3, 1/3)
    assert np.allclose(pi, [2 / 3, 1 / 3])


def test_markov_validation(full2):
    with pytest.raises(ValueError):
        MarkovMeasure(full2, ((1.0, 0.0), (0.0, 1.0)), (0.5, 0.5))  # support mismatch


def test_sample_measure_deterministic_and_lln(full2):
    mu = MarkovMeasure.uniform(full2)
    a = sample_measure(mu, 50, seed=5)
    b = sample_measure(mu, 50, seed=5)
    assert a == b
    big = sample_measure(mu, 10_000, seed=11)
    freq = sum(1 for x in big if x[0] == 0) / len(big)
    assert abs(freq - 0.5) <= 0.02
    assert sample_measure(mu, 0, seed=1) == []


def test_resampling_stays_on_local_sets(full2, rng):
    mu = MarkovMeasure.uniform(full2)
    x = sample_measure(mu, 1, seed=3)[0]
    fut = resample_future(mu, x, rng)
    assert fut.window(-20, 1) == x.window(-20, 1)
    past = resample_past(mu, x, rng)
    assert past.window(0, 21) == x.window(0, 21)


# ------------------------------------------------------------------------ JSON


def test_space_and_measure_json_roundtrip(golden):
    doc = MarkovMeasure.uniform(golden).to_json()
    mu = MarkovMeasure.from_json(doc)
    assert mu.space == golden
    assert SFTSpace.from_json(golden.to_json()) == golden


def test_point_json_roundtrip(full2, rng):
    for _ in range(10):
        x = random_point(full2, rng)
        assert SymbolicPoint.from_json(full2, x.to_json()) == x


def test_stable_onset_errors(full2):
    x = SymbolicPoint.fixed(full2, 0)
    y = SymbolicPoint.fixed(full2, 1)
    with pytest.raises(NotStablePair):
        stable_agreement_onset(x, y)
