import random

import pytest

from khibound.alexander import alexander_poly
from khibound.errors import LabelMultiplicity, MalformedSyntax, MultiComponent, NonPlanar, UnknownName
from khibound.knot_io import (braid_closure, bundled_dt, bundled_names, dt_to_pd, lookup, parse_pd,
                              random_diagram, resolve, shadow)

TREFOIL = "[[1,4,2,5],[3,6,4,1],[5,2,6,3]]"


def test_trefoil_pd():
    d = parse_pd(TREFOIL)
    assert d.c == 3
    assert d.writhe in (3, -3)
    assert sorted(d.strand_order()) == list(range(1, 7))


@pytest.mark.parametrize("text", ["PD[X[1,4,2,5],X[3,6,4,1],X[5,2,6,3]]", "(1,4,2,5),(3,6,4,1),(5,2,6,3)"])
def test_other_pd_syntaxes(text):
    assert parse_pd(text).crossings == parse_pd(TREFOIL).crossings


@pytest.mark.parametrize("bad,exc", [
    ("[[1,2,3]]", MalformedSyntax),
    ("[[1,4,2,5],[3,6,4,1],[5,2,6,7]]", LabelMultiplicity),
    ("not a code", MalformedSyntax),
    ("[[0,1,1,0]]", MalformedSyntax),
])
def test_malformed(bad, exc):
    with pytest.raises(exc):
        parse_pd(bad)


def test_two_component_link_rejected():
    # Hopf link
    with pytest.raises((MultiComponent, LabelMultiplicity, NonPlanar)):
        parse_pd("[[4,1,3,2],[2,3,1,4]]")


def test_bundled_table():
    names = bundled_names()
    assert names[0] == "unknot" and "10_153" in names and len(names) == 16
    for n in names[1:]:
        d = lookup(n)
        assert d.c == int(n.split("_")[0])
        # the DT code and the stored PD code describe the same knot type
        # (3_1 keeps the hand-written code above rather than the converter's)
        from_dt = dt_to_pd(bundled_dt(n))
        assert from_dt.c == d.c
        assert alexander_poly(from_dt) == alexander_poly(d)
        if n != "3_1":
            assert from_dt.crossings == d.crossings
    assert lookup("3_1").crossings == parse_pd(TREFOIL).crossings


def test_aliases_and_unknown():
    assert lookup("0_1").c == 0
    with pytest.raises(UnknownName):
        lookup("9_42x")
    assert resolve(TREFOIL).c == 3
    assert resolve("4 6 2", dt=True).c == 3


def test_shadow_counts():
    for n in bundled_names()[1:]:
        sh = shadow(lookup(n))
        assert sh.n_edges == 2 * sh.n_vertices
        assert sh.euler() == 2
        assert len(sh.faces) == sh.n_vertices + 2


def test_random_diagrams_are_valid():
    rng = random.Random(11)
    for _ in range(100):
        d = random_diagram(rng, max_crossings=8)
        assert 1 <= d.c <= 8
        assert shadow(d).euler() == 2


def test_braid_closure_trefoil():
    d = braid_closure([1, 1, 1], 2)
    assert d.c == 3 and abs(d.writhe) == 3
    with pytest.raises(MultiComponent):
        braid_closure([1, 1], 2)
