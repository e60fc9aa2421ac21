import cmath
import itertools
import math

import numpy as np
import pytest

from smtc_anomaly import catalog
from smtc_anomaly.algebra import central_charge, twists
from smtc_anomaly.extensions import (
    ZestError,
    ZestParameter,
    cascade_layer1,
    cascade_layer3,
    cascade_layer3_linear,
    embed_check,
    find_isomorphism,
    grading,
    zest,
    zest_orbit,
)
from smtc_anomaly.indicators import indicator_epin
from smtc_anomaly.symmetry import check_eta_cocycle


@pytest.fixture(scope="module")
def fixtures():
    return {f.name: f for f in catalog.build_extension_fixtures()}


@pytest.fixture(scope="module")
def zested(cat):
    return zest(cat("u1_20")[0], ZestParameter.root(6))


def test_grading_of_u1_20(cat):
    odd = grading(cat("u1_20")[0]).odd
    assert odd == tuple(bool(a % 2) for a in range(20))


def test_zest_fusion_group(zested):
    assert zested.orders == (2, 10)
    assert central_charge(zested.category) == 0


def test_zest_r_symbols_closed_form(zested):
    C = zested.category
    worst = 0.0
    for x, y in itertools.product(range(20), repeat=2):
        a1, b1 = divmod(x, 10)
        a2, b2 = divmod(y, 10)
        expected = cmath.exp(1j * math.pi * (a1 * a2 + a1 * b2 + b1 * b2 / 5))
        worst = max(worst, abs(C.rsym(x, y, C.rules.products[x][y][0]) - expected))
    assert worst < 1e-9


def test_zest_twists_follow_relabel(zested):
    th = twists(zested.category)
    assert np.allclose(th[list(zested.relabel)], zested.theta, atol=1e-9)


def test_zest_odd_odd_fusion_picks_up_psi(cat, zested):
    mul = cat("u1_20")[0].group_tables[0]
    assert zested.mul[1, 1] == mul[mul[1, 10], 1] == 12
    assert zested.mul[2, 4] == mul[2, 4]


def test_zest_orbit_central_charges(cat):
    orbit = zest_orbit(cat("u1_20")[0])
    turns = [round(cmath.phase(r.b) / (2 * math.pi) * 16) % 16 for r in orbit]
    assert turns == [2, 6, 10, 14]
    assert [central_charge(r.category) for r in orbit] == [6, 0, 2, 4]


@pytest.mark.parametrize("j", [0, 1, 4, 8])
def test_even_eighth_roots_are_inconsistent(cat, j):
    with pytest.raises(ZestError):
        zest(cat("u1_20")[0], ZestParameter.root(j))


def test_zest_refuses_bad_input(cat):
    with pytest.raises(ZestError):
        zest(cat("semion_fermion")[0], ZestParameter(1))
    with pytest.raises(NotImplementedError):
        zest(cat("su2_6")[0], ZestParameter(1))
    with pytest.raises(ValueError):
        ZestParameter(2)


def test_zest_matches_catalog_b(cat, zested):
    B = cat("zested_b")[0]
    phi = find_isomorphism(zested.category, B)
    assert phi is not None
    assert find_isomorphism(cat("u1_20")[0], B) is None


def test_find_isomorphism_respects_pins(cat):
    c = cat("u1_20")[0]
    assert find_isomorphism(c, c) == tuple(range(20))
    assert find_isomorphism(c, c, {1: 1}) == tuple(range(20))
    # theta_3 differs from theta_1
    assert find_isomorphism(c, c, {1: 3}) is None


@pytest.mark.parametrize("name", ["u1_20", "zested_b", "u1_2xu1_m4", "su2_6", "toric_code"])
def test_embeddings(cat, fixtures, name):
    smtc, ext = cat(fixtures[name].smtc)[0], fixtures[name].ext
    rep = embed_check(smtc, ext, fixtures[name].embedding)
    assert rep.ok, rep.violations[:3]


def test_u1_5_sits_in_b_as_diagonal(fixtures):
    assert fixtures["zested_b"].embedding[1] == 11  # (1, 1)


def test_embedding_failures(cat):
    u5, u20 = cat("u1_5")[0], cat("u1_20")[0]
    assert not embed_check(u5, u20, range(10)).ok
    assert not embed_check(u5, u20, [0] * 10).ok
    assert not embed_check(u5, u20, [2 * a + 40 for a in range(10)]).ok


# ---- cascade -----------------------------------------------------------------


def test_layer1_so33_obstructed(cat):
    res = cascade_layer1(cat("so3_3")[0], [cat("su2_6")[0]])
    assert res.obstructed and res.witness is None
    assert all(c.denominator == 4 for _, c in res.charges)


def test_layer1_u1_5_unobstructed(cat):
    res = cascade_layer1(cat("u1_5")[0], [cat("u1_20")[0]])
    assert not res.obstructed
    assert "zested" in res.witness


def test_layer1_without_orbit(cat):
    # U(1)_20 alone has c = 1
    assert cascade_layer1(cat("u1_5")[0], [cat("u1_20")[0]], orbit=False).obstructed
    assert not cascade_layer1(cat("u1_5")[0], [cat("zested_b")[0]], orbit=False).obstructed


def layer3(cat, fixtures, name, ref):
    smtc, act = cat(ref)
    ext, emb, ext_act = fixtures[name]
    return (smtc, act, ext, ext_act, emb), cascade_layer3(smtc, act, ext, ext_act, emb)


def test_layer3_u1_5_unobstructed(cat, fixtures):
    args, res = layer3(cat, fixtures, "zested_b", "u1_5/z4")
    assert not res.obstructed
    ext, ext_act = args[2], args[3]
    assert check_eta_cocycle(ext, ext_act.with_(eta=res.eta)).ok
    emb = list(args[4])
    assert np.allclose(res.eta[emb], args[1].eta)
    assert cascade_layer3_linear(*args) is False


def test_layer3_semion_fermion_obstructed(cat, fixtures):
    args, res = layer3(cat, fixtures, "u1_2xu1_m4", "semion_fermion/z4")
    assert res.obstructed
    assert res.searched == 2**9
    assert res.best_defect > 1e-3
    assert cascade_layer3_linear(*args) is True
    assert cascade_layer3_linear(*args, solve_u=False) is True


def test_layer3_trivial(cat, fixtures):
    args, res = layer3(cat, fixtures, "toric_code", "trivial/z4")
    assert not res.obstructed
    assert cascade_layer3_linear(*args) is False


def test_layer3_rejects_mismatched_action(cat, fixtures):
    smtc, act = cat("u1_5/z4")
    ext, emb, ext_act = fixtures["zested_b"]
    with pytest.raises(ValueError):
        cascade_layer3(smtc, act, ext, ext_act, list(emb[::-1]))


@pytest.mark.parametrize(
    "ref,ext,layer3_fixture",
    [("u1_5", "u1_20", "zested_b"), ("semion_fermion", "u1_2xu1_m4", "u1_2xu1_m4"), ("so3_3", "su2_6", None)],
)
def test_cascade_matches_indicator(cat, fixtures, ref, ext, layer3_fixture):
    """Odd nu shows up in layer 1; a nonzero even nu only in layer 3."""
    nu = indicator_epin(*cat(f"{ref}/z4")).nu
    first = cascade_layer1(cat(ref)[0], [cat(ext)[0]]).obstructed
    assert first == bool(nu % 2)
    if layer3_fixture is not None:
        _, res = layer3(cat, fixtures, layer3_fixture, f"{ref}/z4")
        assert (first or res.obstructed) == (nu != 0)


def test_zested_category_is_modular(zested):
    from smtc_anomaly.algebra import muger_center

    assert zested.category.rules.abelian
    assert muger_center(zested.category) == [0]


def test_zesting_twice_restores_fusion(cat, zested):
    mul = cat("u1_20")[0].group_tables[0]
    r = np.array(zested.relabel)
    for again in zest_orbit(zested.category):
        assert again.orders == (20,)
        assert np.array_equal(again.mul[np.ix_(r, r)], r[mul])


def test_layer1_trivial_theory(cat):
    res = cascade_layer1(cat("trivial")[0], [cat("toric_code")[0]])
    assert not res.obstructed and res.witness == "toric code"
