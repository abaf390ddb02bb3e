import pytest

from khibound.alexander import alexander_poly
from khibound.errors import BandCycle, ValidityFailure
from khibound.heegaard_builder import (MERIDIAN, BuildChoice, FineSurface, band_sum,
                                       build_fine_surface, build_sutured_handlebody, check_sutured,
                                       choose_construction, crossing_curve, unknot_system)
from khibound.knot_io import braid_closure, bundled_names, lookup, shadow
from khibound.suture_model import is_minimal, region_report
from khibound.torsion import torsion_norm

SMALL = [n for n in bundled_names() if n != "10_153"]

# best construction per knot: torsion norm of the sutured handlebody
FROZEN_TORSION = {n: alexander_poly(lookup(n)).l1_norm() for n in SMALL}
FROZEN_TORSION["10_153"] = 19


def test_crossing_curve_trefoil():
    sh = shadow(lookup("3_1"))
    for v in range(3):
        word = crossing_curve(sh, v)
        assert len(word) == 4
        faces = {sh.corner_face(v, k) for k in range(4)}
        assert len(set(word)) == len(faces) == 4


def test_crossing_curve_kink_meets_a_face_twice():
    d = braid_closure([1], 2)
    word = crossing_curve(shadow(d), 0)
    assert len(word) == 4
    assert max(word.count(x) for x in word) == 2


def test_fine_surface_genus():
    for name in SMALL[1:]:
        d = lookup(name)
        fs = FineSurface(shadow(d))
        m = fs.m
        assert len(m.vertex_orbits()) == 8 * d.c
        assert m.n_darts() // 2 == 16 * d.c
        assert len(m.face_orbits()) == 6 * d.c
        assert fs.genus == d.c + 1


@pytest.mark.parametrize("name", bundled_names())
def test_three_conditions(name):
    d = lookup(name)
    cs = build_sutured_handlebody(d)
    g = max(d.c + 1, 1)
    assert cs.genus == g and cs.n_alpha == g
    assert len(cs.gamma_components) == g + 1
    rep = region_report(cs, require_two=True)
    plus, minus = rep.euler_pair
    assert plus == minus == 1 - g
    assert is_minimal(cs)


def test_trefoil_example():
    cs = build_sutured_handlebody(lookup("3_1"))
    assert cs.genus == 4 and len(cs.gamma_components) == 5
    assert region_report(cs).euler_pair == (-3, -3)


def test_beta_curves_are_gamma_components():
    d = lookup("4_1")
    fs, spec = build_fine_surface(d)
    assert len(spec.bands) == d.c
    cs = fs.to_curve_system(MERIDIAN)
    check_sutured(cs, d.c + 1, fs)  # condition 3 walks every beta curve


def test_wrong_genus_is_reported():
    cs = build_sutured_handlebody(lookup("3_1"))
    with pytest.raises(ValidityFailure) as info:
        check_sutured(cs, 5)
    assert info.value.condition == 1


def test_band_cycle():
    d = lookup("3_1")
    fs2 = FineSurface(shadow(d))
    for v in range(3):
        fs2.add_crossing_curve(v, f"x{v}")
    with pytest.raises(BandCycle):
        band_sum(fs2, ["x0", "x1", "x2"], [("x0", "x1"), ("x1", "x2"), ("x2", "x0")])
    with pytest.raises(BandCycle):
        band_sum(fs2, ["x0", "x1", "x2"], [("x0", "x1")])


@pytest.mark.parametrize("name", SMALL[1:] + ["10_153"])
def test_torsion_of_chosen_construction(name):
    d = lookup(name)
    cs, choice = choose_construction(d)
    assert choice.torsion == torsion_norm(cs) == FROZEN_TORSION[name]


def test_choice_rebuilds_the_same_system():
    d = lookup("7_2")
    cs, choice = choose_construction(d)
    again = build_sutured_handlebody(d, BuildChoice(choice.start, choice.reverse, choice.torsion))
    assert again.serialize() == cs.serialize()
    assert build_sutured_handlebody(d).serialize() == cs.serialize()


def test_unknot():
    assert build_sutured_handlebody(lookup("unknot")) == unknot_system()
