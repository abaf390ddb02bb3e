import random
from dataclasses import replace

import pytest

from khibound.alexander import alexander_poly, khi_lower_bound
from khibound.errors import CertificateMismatch, InvalidInput
from khibound.heegaard_builder import (MERIDIAN, build_fine_surface, build_sutured_handlebody,
                                       random_curve_system, unknot_system)
from khibound.knot_io import lookup
from khibound.reduction_engine import (BoundCertificate, Leaf, Move, SearchConfig, potential, replay,
                                       tree_value, upper_bound, upper_bound_report)
from khibound.suture_model import VanishingRuleSet, is_base_case

SHARP = SearchConfig(rules=VanishingRuleSet.sharpen())


def bound_for(name, cfg=SHARP):
    d = lookup(name)
    cs = build_sutured_handlebody(d)
    return upper_bound(cs, cfg, khi_lower_bound(alexander_poly(d)), knot=name), cs


def test_unknot():
    b, cert = upper_bound(unknot_system(), SearchConfig())
    assert b == 1 and isinstance(cert.tree, Leaf)
    assert replay(cert, unknot_system()) == 1


@pytest.mark.parametrize("name,value", [("3_1", 3), ("4_1", 5), ("5_2", 7)])
def test_small_knots_exhaustive(name, value):
    (b, cert), cs = bound_for(name)
    assert b == value == cert.bound
    assert replay(cert, cs) == value


def test_trefoil_needs_no_rules():
    (b, cert), _ = bound_for("3_1", SearchConfig())
    assert b == 3 and cert.rules_used == ()


def test_certificate_text_round_trip():
    (b, cert), cs = bound_for("4_1")
    text = cert.to_text()
    again = BoundCertificate.from_text(text)
    assert again.to_text() == text
    assert replay(again, cs) == b
    assert text.startswith("khibound-certificate 1\n")
    assert "rules-used V2" in text


def test_replay_against_other_knot():
    (_, cert), _ = bound_for("3_1")
    with pytest.raises(CertificateMismatch):
        replay(cert, build_sutured_handlebody(lookup("4_1")))


def test_corrupted_leaf_value():
    (_, cert), cs = bound_for("4_1")
    lines = cert.to_text().splitlines()
    k = next(i for i, ln in enumerate(lines) if ln.startswith("leaf ") and ln.split()[2] == "1")
    parts = lines[k].split()
    parts[2] = "0"
    lines[k] = " ".join(parts)
    bad = BoundCertificate.from_text("\n".join(lines) + "\n")
    with pytest.raises(CertificateMismatch):
        replay(bad, cs)


def test_corrupted_move():
    (_, cert), cs = bound_for("3_1")
    text = cert.to_text().replace("\nmove ", "\nmove 9", 1)
    with pytest.raises(CertificateMismatch):
        replay(BoundCertificate.from_text(text), cs)


def test_truncated_certificate():
    (_, cert), _ = bound_for("3_1")
    with pytest.raises(CertificateMismatch):
        BoundCertificate.from_text(cert.to_text()[:-30])
    with pytest.raises(CertificateMismatch):
        BoundCertificate.from_text("hello\n")


def test_deterministic_text():
    (_, a), _ = bound_for("5_1")
    (_, b), _ = bound_for("5_1")
    assert a.to_text() == b.to_text()


def test_workers_do_not_change_the_certificate():
    (_, a), _ = bound_for("4_1")
    (_, b), _ = bound_for("4_1", replace(SHARP, workers=3))
    assert a.to_text() == b.to_text()


@pytest.mark.parametrize("name", ["3_1", "4_1", "5_2", "6_1"])
def test_strategy_dominance(name):
    (ex, _), _ = bound_for(name)
    (beam, _), _ = bound_for(name, replace(SHARP, strategy="beam"))
    (gr, _), _ = bound_for(name, replace(SHARP, strategy="greedy"))
    assert khi_lower_bound(alexander_poly(lookup(name))) <= ex <= gr
    assert ex <= beam


def test_rules_only_lower_the_bound():
    for name in ("4_1", "5_2"):
        (off, c1), cs = bound_for(name, SearchConfig(strategy="greedy"))
        (on, c2), _ = bound_for(name, replace(SHARP, strategy="greedy"))
        assert on <= off
        assert replay(c1, cs) == off and c1.rules_used == ()


def test_budget_exhaustion_still_sound():
    cfg = replace(SHARP, node_budget=1)
    d = lookup("6_2")
    cs = build_sutured_handlebody(d)
    b, cert, rep = upper_bound_report(cs, cfg, 0)
    assert cert.budget_exhausted and rep.stats.exhausted
    assert replay(cert, cs) == b >= khi_lower_bound(alexander_poly(d))


def test_non_minimal_input_rejected():
    fs, _ = build_fine_surface(lookup("3_1"))
    with pytest.raises(InvalidInput):
        upper_bound(fs.to_curve_system(MERIDIAN), SearchConfig())


@pytest.mark.parametrize("kw", [dict(strategy="dfs"), dict(node_budget=0), dict(time_budget=-1),
                                dict(beam_width=0), dict(lower_bound="magic"), dict(workers=0)])
def test_config_validation(kw):
    with pytest.raises(InvalidInput):
        SearchConfig(**kw)


def test_config_snapshot_round_trip():
    cfg = SearchConfig(strategy="beam", beam_width=5, depth_cap=7, rules=VanishingRuleSet(v0=True),
                       node_budget=123, time_budget=4.5, memo=False, seed=3, lower_bound="none")
    assert SearchConfig.parse_snapshot(cfg.snapshot()) == cfg


def _check_tree(cs, tree):
    from khibound.suture_model import BypassArc, bypass
    if isinstance(tree, Leaf):
        assert is_base_case(cs)
        return
    a, b = bypass(cs, BypassArc(tree.disk, tree.position, tree.side))
    assert potential(a) < potential(cs) and potential(b) < potential(cs)
    assert sum(a.counts) < sum(cs.counts) and sum(b.counts) < sum(cs.counts)
    _check_tree(a, tree.left)
    _check_tree(b, tree.right)


def test_random_systems_terminate():
    rng = random.Random(31)
    for _ in range(25):
        cs = random_curve_system(rng, max_genus=4)
        for strategy in ("greedy", "exhaustive"):
            cfg = SearchConfig(strategy=strategy, rules=VanishingRuleSet.sharpen(), node_budget=10**9,
                               time_budget=10**6)
            b, cert = upper_bound(cs, cfg)
            assert b == tree_value(cert.tree) == replay(cert, cs)
            _check_tree(cs.canonical(), cert.tree)
            assert not cert.budget_exhausted


def test_depth_cap_falls_back_to_greedy():
    cfg = replace(SHARP, depth_cap=0)
    (b, cert), cs = bound_for("5_2", cfg)
    assert isinstance(cert.tree, Move)
    assert replay(cert, cs) == b
