from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given
from hypothesis import strategies as st

from khibound.errors import HypothesisNotMet, InvalidGenus, InvalidInput, InvalidSlope
from khibound.surgery_calc import (GradingProfile, SurgeryQuery, i_sharp_at_minus, ladder_one_minus,
                                   lspace_profile, matches_hypothesis, middle_table, parse_slope,
                                   parse_slope_grid, surgery_dim, surgery_dims)


def test_hypothesis_examples():
    assert matches_hypothesis(GradingProfile(2, {i: 1 for i in range(-2, 3)}))
    assert not matches_hypothesis(GradingProfile(3, {i: 1 for i in range(-3, 4)}))
    assert not matches_hypothesis(GradingProfile(1, {-1: 1, 0: 1, 1: 1}))
    assert matches_hypothesis(lspace_profile(5))
    assert not matches_hypothesis(GradingProfile(4, {-4: 1, -3: 1, 0: 2, 3: 1, 4: 1}))


@pytest.mark.parametrize("dims", [{0: 1}, {-3: 1, 3: 1, 0: 1}, {-1: 1, 0: 1, 1: 2}, {0: -1, 2: 1, -2: 1}])
def test_profile_invariants(dims):
    with pytest.raises(InvalidInput):
        GradingProfile(2, dims)


def test_ladder():
    t = ladder_one_minus(2)
    assert (t.dim(4), t.dim(3), t.dim(2), t.dim(0)) == (1, 0, 1, 1)
    assert t.dim(1) == 1 and 2 in t.inferred
    t = ladder_one_minus(3)
    assert (t.dim(6), t.dim(5), t.dim(4), t.dim(3), t.dim(2), t.dim(0)) == (1, 0, 0, 1, 1, 1)
    with pytest.raises(HypothesisNotMet):
        ladder_one_minus(1)


def test_middle_table():
    t = middle_table(2)
    assert [t.dim(i) for i in range(-2, 3)] == [1] * 5 and t.total() == 5
    assert middle_table(5).total() == 11
    with pytest.raises(HypothesisNotMet):
        middle_table(1)


@pytest.mark.parametrize("g", range(2, 21))
def test_tables_are_consistent(g):
    assert ladder_one_minus(g).check() == []
    assert middle_table(g).check() == []
    assert i_sharp_at_minus(g) == 2 * g + 1


def test_profile_mismatch_is_rejected():
    with pytest.raises(HypothesisNotMet):
        middle_table(3, GradingProfile(3, {i: 1 for i in range(-3, 4)}))
    assert i_sharp_at_minus(3, lspace_profile(3)) == 7


@pytest.mark.parametrize("p,q,g,s,want", [(3, 1, 2, 1, 3), (0, 1, 2, 1, 6), (-3, 1, 2, 2, 3), (7, 2, 3, 1, 13)])
def test_surgery_examples(p, q, g, s, want):
    assert surgery_dim(SurgeryQuery(p, q, g, s)) == want


def test_surgery_cli_examples():
    assert surgery_dims(3, 1, 2) == (3, 9)
    assert surgery_dims(-3, 1, 2) == (9, 3)


@pytest.mark.parametrize("p,q,g,exc", [(2, 4, 2, InvalidSlope), (1, 0, 2, InvalidSlope), (1, -1, 2, InvalidSlope),
                                       (1, 1, 1, InvalidGenus)])
def test_surgery_errors(p, q, g, exc):
    with pytest.raises(exc):
        SurgeryQuery(p, q, g)


@given(st.integers(2, 12), st.integers(-200, 200), st.integers(1, 12))
def test_mirror_and_positivity(g, p, q):
    if gcd(p, q) != 1:
        return
    a = surgery_dim(SurgeryQuery(p, q, g, 1))
    b = surgery_dim(SurgeryQuery(-p, q, g, 2))
    assert a == b > 0
    # never below the lower bound |H_1| = |p|
    assert a >= abs(p)


def test_threshold_agreement():
    for g in range(2, 9):
        r = Fraction(2 * g - 1)
        for k in range(1, 7):
            p, q = r.numerator * k, r.denominator * k
            assert p == (4 * g - 2) * q - p


def test_slope_parsing():
    assert parse_slope("-7/2") == (-7, 2)
    assert parse_slope("5") == (5, 1)
    with pytest.raises(InvalidSlope):
        parse_slope("x/2")
    grid = parse_slope_grid("-2:2/1:2")
    assert (-1, 2) in grid and (0, 2) not in grid and (2, 2) not in grid
    assert parse_slope_grid("1/2, 3/1") == [(1, 2), (3, 1)]
