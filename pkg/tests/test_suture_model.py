import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import isomorphic, relabel_randomly
from khibound.errors import CurveSystemError, InvalidInput, TooFewIntersections
from khibound.heegaard_builder import build_sutured_handlebody, random_curve_system, unknot_system
from khibound.knot_io import lookup
from khibound.suture_model import (HEX_MINUS, HEX_ORIGINAL, HEX_PLUS, BypassArc, CurveSystem,
                                   VanishingRuleSet, bypass, decomposed_suture_count,
                                   enumerate_bypass_arcs, firing_rule, is_base_case, is_minimal,
                                   leaf_value, memo_key, reduce_to_minimal_position, region_report,
                                   rotate_matching)


def noncrossing_matchings(n):
    if n == 0:
        return [frozenset()]
    out = []
    pts = list(range(n))

    def rec(pts):
        if not pts:
            return [[]]
        res = []
        a = pts[0]
        for k in range(1, len(pts), 2):
            b = pts[k]
            inside, outside = pts[1:k], pts[k + 1:]
            for m1 in rec(inside):
                for m2 in rec(outside):
                    res.append([(a, b)] + m1 + m2)
        return res

    for m in rec(pts):
        out.append(frozenset(frozenset(p) for p in m))
    return out


def test_hexagon_matchings():
    all5 = noncrossing_matchings(6)
    assert len(set(all5)) == 5  # Catalan(3)
    for m in (HEX_ORIGINAL, HEX_PLUS, HEX_MINUS):
        assert m in all5
    # the bypass triangle is the three rotations of one matching
    assert rotate_matching(HEX_ORIGINAL, 1) == HEX_PLUS
    assert rotate_matching(HEX_ORIGINAL, 2) == HEX_MINUS
    assert rotate_matching(HEX_ORIGINAL, 3) == HEX_ORIGINAL


def test_unknot_system():
    cs = unknot_system()
    assert cs.genus == 1 and cs.counts == (2,)
    assert is_base_case(cs) and leaf_value(cs) == 1
    assert region_report(cs, require_two=True).euler_pair == (0, 0)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_serialization_round_trip(seed):
    cs = random_curve_system(random.Random(seed))
    again = CurveSystem.deserialize(cs.serialize())
    assert again == cs and again.key() == cs.key()


def test_deserialize_garbage():
    with pytest.raises(InvalidInput):
        CurveSystem.deserialize("curvesystem 1\ngenus x\n")
    text = unknot_system().serialize().replace("d 0 6", "d 0 5")
    with pytest.raises(CurveSystemError):
        CurveSystem.deserialize(text)


def test_validation_catches_bad_euler():
    cs = unknot_system()
    with pytest.raises(CurveSystemError):
        CurveSystem(2, cs.n_alpha, cs.theta, cs.sigma, cs.alpha, cs.fwd, cs.region, cs.signs)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_key_ignores_relabelling(seed):
    rng = random.Random(seed)
    cs = random_curve_system(rng)
    other = relabel_randomly(cs, rng)
    assert memo_key(other) == memo_key(cs)
    assert other.canonical().serialize() == cs.canonical().serialize() or \
        other.canonical().signs == tuple(-s for s in cs.canonical().signs)


def test_key_matches_isomorphism_oracle(small_systems):
    rng = random.Random(3)
    pool = list(small_systems) + [relabel_randomly(cs, rng) for cs in small_systems[:30]]
    for a, b in itertools.combinations(pool, 2):
        assert (memo_key(a) == memo_key(b)) == isomorphic(a, b)


def test_different_counts_different_keys(small_systems):
    for a, b in itertools.combinations(small_systems, 2):
        if sorted(a.counts) != sorted(b.counts) or a.counts != b.counts:
            assert memo_key(a) != memo_key(b)


def test_bypass_side_does_not_matter():
    cs = build_sutured_handlebody(lookup("4_1"))
    i = max(range(cs.n_alpha), key=lambda j: cs.counts[j])
    for j in range(cs.counts[i]):
        assert bypass(cs, BypassArc(i, j, 0)) == bypass(cs, BypassArc(i, j, 1))


def test_too_few_intersections():
    cs = unknot_system()
    with pytest.raises(TooFewIntersections):
        enumerate_bypass_arcs(cs, 0)


def _check_bypass_outputs(cs):
    for i, n in enumerate(cs.counts):
        if n < 3:
            continue
        arcs = enumerate_bypass_arcs(cs, i)
        assert len(arcs) == 2 * n
        for arc in arcs:
            if arc.side:
                continue
            for out in bypass(cs, arc):
                out.validate()
                assert is_minimal(out)
                assert out.genus == cs.genus and out.n_alpha == cs.n_alpha
                assert out.counts[i] <= n - 2
                assert all(out.counts[k] <= cs.counts[k] for k in range(cs.n_alpha))
                assert out.euler() == 2 - 2 * cs.genus


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_bypass_count_drop(seed):
    _check_bypass_outputs(random_curve_system(random.Random(seed)))


def test_reduction_is_canonical_and_minimal():
    rng = random.Random(9)
    for _ in range(20):
        cs = random_curve_system(rng)
        r = reduce_to_minimal_position(cs)
        assert is_minimal(r) and r.canonical() is r
        assert r.counts == cs.counts  # builder output is already minimal


def test_rule_names_round_trip():
    rules = VanishingRuleSet.sharpen()
    assert rules.names() == ["V0", "V1", "V2"]
    assert VanishingRuleSet.from_names(["v0", "V2"]) == VanishingRuleSet(True, False, True)
    with pytest.raises(InvalidInput):
        VanishingRuleSet.from_names(["V9"])


def test_leaf_rules():
    cs = unknot_system()
    # one suture pair on a solid torus: one product disk, two suture arcs joined into one curve
    assert decomposed_suture_count(cs) == 1
    assert firing_rule(cs, VanishingRuleSet.sharpen()) is None
    rng = random.Random(4)
    zero = None
    while zero is None:
        s = random_curve_system(rng, max_genus=3, max_moves=4)
        if is_base_case(s) and 0 in s.counts:
            zero = s
    assert firing_rule(zero, VanishingRuleSet(v0=True)) == "V0"
    assert leaf_value(zero) == 1 and leaf_value(zero, VanishingRuleSet(v0=True)) == 0


def test_leaf_value_needs_base_case():
    cs = build_sutured_handlebody(lookup("3_1"))
    with pytest.raises(InvalidInput):
        leaf_value(cs)
