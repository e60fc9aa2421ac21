import cmath
import math

import numpy as np
import pytest

from smtc_anomaly import catalog
from smtc_anomaly.algebra import quantum_dimension
from smtc_anomaly.axioms import check_all
from smtc_anomaly.core import load_category, validate_structure
from smtc_anomaly.symmetry import check_action, load_action

from conftest import ACTIONS, CATEGORIES, GOLDEN


@pytest.mark.parametrize("name", CATEGORIES)
def test_entry_is_coherent(cat, name):
    c, _ = cat(name)
    assert validate_structure(c).ok
    assert all(r.ok for r in check_all(c))


@pytest.mark.parametrize("name", CATEGORIES)
def test_golden_category(cat, name):
    c, _ = cat(name)
    with open(GOLDEN / f"{name}.json") as fh:
        g = load_category(fh)
    assert g.labels == c.labels and g.fermion == c.fermion
    assert np.array_equal(g.N, c.N)
    assert g.F.keys() == c.F.keys() and g.R.keys() == c.R.keys()
    assert max(np.abs(g.F[k] - c.F[k]).max() for k in c.F) < 1e-12
    assert max(np.abs(g.R[k] - c.R[k]).max() for k in c.R) < 1e-12


@pytest.mark.parametrize("ref", ACTIONS)
def test_golden_action(cat, ref):
    c, act = cat(ref)
    name, a = ref.split("/")
    with open(GOLDEN / f"{name}.{a}.action.json") as fh:
        g = load_action(fh, c)
    assert np.array_equal(g.rho, act.rho)
    assert np.abs(g.U - act.U).max() < 1e-12
    assert np.abs(g.eta - act.eta).max() < 1e-12
    assert g.charges == act.charges
    assert all(r.ok for r in check_action(c, g))


def test_unknown_names():
    with pytest.raises(KeyError):
        catalog.get("nope")
    with pytest.raises(KeyError):
        catalog.get("u1_5/z8")


def test_default_actions(cat):
    assert cat("u1_5")[1] is not None
    assert cat("su2_6")[1] is None


# ---- published data ---------------------------------------------------------


def test_u1_5_r_symbols_and_action(cat):
    c, act = cat("u1_5/z4")
    for a in range(10):
        for b in range(10):
            assert abs(c.rsym(a, b, (a + b) % 10) - cmath.exp(1j * math.pi * a * b / 5)) < 1e-12
    assert act.rho[1].tolist() == [(3 * a) % 10 for a in range(10)]
    a, b = np.meshgrid(range(10), range(10), indexing="ij")
    assert np.all(act.U[:, a, b, (a + b) % 10] == 1)
    assert np.all(act.eta == 1)


def test_semion_fermion_data(cat):
    c, act = cat("semion_fermion/z2")
    s, psi, st = (c.idx(x) for x in ("s", "psi", "stilde"))
    R = [[1, 1, 1, 1], [1, 1j, 1, 1j], [1, 1, -1, -1], [1, 1j, -1, -1j]]
    U = [[1, 1, 1, 1], [1, 1, 1, 1], [1, -1, 1, -1], [1, -1, 1, -1]]
    mul = c.group_tables[0]
    for a in range(4):
        for b in range(4):
            assert c.rsym(a, b, mul[a, b]) == pytest.approx(R[a][b])
            assert act.U[1, a, b, mul[a, b]] == pytest.approx(U[a][b])
    for x in (s, st):
        for y in (s, st):
            for z in (s, st):
                assert c.group_tables[1][x, y, z] == pytest.approx(-1)
    assert c.rsym(psi, psi, 0) == -1
    assert np.allclose(act.eta[[psi, s, st], 1, 1], [-1, -1j, 1j])
    assert act.rho[1][s] == st


def test_so33_u_symbols(cat):
    c, act = cat("so3_3/z2")
    s, st, psi = (c.idx(x) for x in ("s", "stilde", "psi"))
    plus_i = [(s, st, psi), (st, psi, s), (psi, s, st), (s, s, s), (st, st, st)]
    minus_i = [(s, psi, st), (psi, st, s), (st, s, psi)]
    for x, y, z in plus_i:
        assert act.U[1, x, y, z] == pytest.approx(1j)
    for x, y, z in minus_i:
        assert act.U[1, x, y, z] == pytest.approx(-1j)


def test_su2_6(cat):
    c, _ = cat("su2_6")
    assert c.n == 7
    d = quantum_dimension(c)
    # quantum integer [3] at q = e^{i pi / 8}
    assert d[2] == pytest.approx(1 + math.sqrt(2))
    assert d[1] == pytest.approx(2 * math.cos(math.pi / 8))
    q = cmath.exp(1j * math.pi / 4)
    for a in range(7):
        for b in range(7):
            for k in c.rules.products[a][b]:
                expected = (-1) ** ((a + b - k) // 2) * q ** ((k * (k + 2) - a * (a + 2) - b * (b + 2)) / 8)
                assert abs(c.rsym(a, b, k) - expected) < 1e-12


def test_so33_is_even_part_of_su2_6(cat):
    so3, su2 = cat("so3_3")[0], cat("su2_6")[0]
    emb = [0, 2, 4, 6]
    for (a, b, k, d, e, f), blk in so3._blocks.items():
        img = su2.fsym(emb[a], emb[b], emb[k], emb[d], emb[e], emb[f])
        assert abs(blk.item() - img) < 1e-12


def test_b_data(cat):
    c, act = cat("zested_b/z4")
    x = c.idx("(1,0)")
    assert c.rsym(x, x, 0) == pytest.approx(-1)
    assert np.allclose(c.group_tables[1], 1)
    assert act.rho[1][c.idx("(1,3)")] == c.idx("(1,9)")
    assert act.rho[1][c.idx("(0,7)")] == c.idx("(0,1)")


def test_fixture_unpacking():
    for fix in catalog.build_extension_fixtures():
        ext, emb, act = fix
        assert ext is fix.ext and len(emb) == catalog.get(fix.smtc)[0].n
