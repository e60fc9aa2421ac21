import cmath
import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from smtc_anomaly.catalog import charged_action
from smtc_anomaly.indicators import (
    IndicatorResult,
    OffGridError,
    SymmetryTypeError,
    anomaly_class,
    class_a_theta,
    class_c_theta,
    combine_epin,
    epin_shadows,
    gaplessness_check,
    hall_conductance,
    indicator_epin,
    indicator_pin_plus,
    partition_cp2,
    partition_rp4,
    partition_s2s2,
    partition_s4,
    tenfold_report,
)
from smtc_anomaly.symmetry import apply_gauge, random_gauge

TOL = 1e-8

HEADLINE = {"u1_5/z4": (1, 0), "semion_fermion/z4": (-1, 2), "so3_3/z4": (-1j, 3)}
PIN_PLUS = {"semion_fermion/z2": 2, "so3_3/z2": 3, "trivial/z2": 0}
CI = ["trivial/ci", "toric_fermion/ci", "toric_fermion/ci_eT", "toric_fermion/ci_eTmT"]


@pytest.mark.parametrize("ref", HEADLINE)
def test_epin_headline(cat, ref):
    value, nu = HEADLINE[ref]
    res = indicator_epin(*cat(ref))
    assert abs(res.value - value) < TOL
    assert res.nu == nu and res.order == 4


@pytest.mark.parametrize("ref", HEADLINE)
def test_epin_other_orientation_conjugates(cat, ref):
    plus = indicator_epin(*cat(ref))
    minus = indicator_epin(*cat(ref), phase=-1j)
    assert abs(minus.value - plus.value.conjugate()) < TOL
    assert minus.nu == (-plus.nu) % 4


@pytest.mark.parametrize("ref", HEADLINE)
def test_shadows_recombine(cat, ref):
    c, act = cat(ref)
    z = epin_shadows(c, act)
    res = indicator_epin(c, act)
    assert res.shadows == z
    assert abs(combine_epin(z) - res.value) < 1e-12


def test_so33_shadows(cat):
    z = epin_shadows(*cat("so3_3/z4"))
    assert np.allclose(z, [1, 1, -1, -1], atol=TOL)


@pytest.mark.parametrize("ref", PIN_PLUS)
def test_pin_plus(cat, ref):
    res = indicator_pin_plus(*cat(ref))
    nu = PIN_PLUS[ref]
    # accepted up to the orientation flip nu <-> 16 - nu
    assert res.nu in (nu, (-nu) % 16)
    assert abs(res.value - cmath.exp(2j * math.pi * res.nu / 16)) < TOL


def test_pin_plus_exact_convention(cat):
    assert indicator_pin_plus(*cat("semion_fermion/z2")).nu == 2
    assert indicator_pin_plus(*cat("so3_3/z2")).nu == 3


@pytest.mark.parametrize("name", ["semion_fermion", "so3_3"])
def test_epin_agrees_with_pin_plus_mod_4(cat, name):
    epin = indicator_epin(*cat(f"{name}/z4")).nu
    pin = indicator_pin_plus(*cat(f"{name}/z2")).nu
    assert epin % 4 == pin % 4


def test_wrong_group_rejected(cat):
    with pytest.raises(SymmetryTypeError):
        indicator_epin(*cat("so3_3/z2"))
    with pytest.raises(SymmetryTypeError):
        indicator_pin_plus(*cat("so3_3/z4"))


def test_inconsistent_action_rejected(cat):
    c, act = cat("so3_3/z4")
    U = act.U.copy()
    U[1, 1, 1, 2] *= -1
    with pytest.raises(ValueError):
        indicator_epin(c, act.with_(U=U))


@pytest.mark.parametrize("ref", list(HEADLINE) + list(PIN_PLUS) + CI)
def test_gauge_invariance(cat, ref):
    c, act = cat(ref)
    ref = _values(c, act)
    for seed in range(20):
        c2, a2 = apply_gauge(c, act, random_gauge(c, act, seed))
        assert np.allclose(_values(c2, a2), ref, atol=TOL, rtol=0)


def _values(c, act):
    if act.charges is not None:
        return [r.value for r in tenfold_report(c, act, "CI")]
    if act.symmetry.order == 4:
        return list(epin_shadows(c, act)) + [indicator_epin(c, act).value]
    return list(partition_rp4(c, act))


# ---- anomaly_class ---------------------------------------------------------


@given(k=st.integers(0, 15))
def test_anomaly_class_roundtrip(k):
    assert anomaly_class(cmath.exp(2j * math.pi * k / 16), "Z16_pinplus") == k


@pytest.mark.parametrize("z", [cmath.exp(0.1j), 0.5, 1j * 1.01])
def test_anomaly_class_off_grid(z):
    with pytest.raises(OffGridError):
        anomaly_class(z, "Z4_epin")


def test_anomaly_class_needs_order():
    with pytest.raises(ValueError):
        anomaly_class(1, "Z2cubed")
    assert anomaly_class(-1, "Z2cubed", 2) == 1


# ---- hand-written oracles ---------------------------------------------------


def toric_fermion_rp4(eta_e, eta_m):
    # T fixes every anyon; label = (e, m, fermion parity)
    total = 0
    for e, m, f in itertools.product((0, 1), repeat=3):
        theta = (-1) ** (e * m + f)
        eta = eta_e**e * eta_m**m * (-1) ** f
        total += theta * eta
    return total / math.sqrt(8) / math.sqrt(2)


@pytest.mark.parametrize(
    "ref,signs", [("toric_fermion/ci", (1, 1)), ("toric_fermion/ci_eT", (-1, 1)), ("toric_fermion/ci_eTmT", (-1, -1))]
)
def test_rp4_oracle(cat, ref, signs):
    value, _, z2 = partition_rp4(*cat(ref))
    assert abs(value - toric_fermion_rp4(*signs)) < TOL
    assert z2 == 0


def test_cp2_semion_fermion_oracle(cat):
    c, _ = cat("semion_fermion")
    # theta = 1, i, -1, -i; charge 1/2 on psi and stilde
    q = [0, 0, Fraction(1, 2), Fraction(1, 2)]
    expected = (1 + 1j + 1 + 1j) / (math.sqrt(2) * 2)
    assert abs(partition_cp2(c, q) - expected) < TOL
    assert abs(expected - cmath.exp(1j * math.pi / 4)) < 1e-12


def u1_5_s2s2(x):
    k = 5
    D = math.sqrt(2 * k)
    total = 0
    for a in range(2 * k):
        for b in range(2 * k):
            s_ab = cmath.exp(-2j * math.pi * a * b / k) / D
            total += cmath.exp(4j * math.pi * x * a) * s_ab * cmath.exp(4j * math.pi * x * b)
    return total / (2 * D)


@pytest.mark.parametrize("num", [1, 3, 5, 7, 9])
def test_s2s2_u1_5_oracle(cat, num):
    c, _ = cat("u1_5")
    x = Fraction(num, 10)
    assert abs(partition_s2s2(c, [a * x for a in range(10)]) - u1_5_s2s2(x)) < TOL


def test_class_a_on_trivial_theory(cat):
    c, _ = cat("trivial")
    theta = class_a_theta(c, [0, Fraction(1, 2)])
    assert theta == (0.0, 0.0)
    h = hall_conductance(theta, "A")
    assert (h.kappa, h.sigma) == (0, 0)


@pytest.mark.parametrize("num", [1, 3, 5, 7, 9])
def test_class_a_u1_5_values_are_rational(cat, num):
    c, _ = cat("u1_5")
    h = hall_conductance(class_a_theta(c, [a * Fraction(num, 10) for a in range(10)]), "A")
    assert h.modulus == 1
    assert h.kappa.denominator <= 10 and h.sigma.denominator <= 10


def test_partition_s4_trivial():
    assert partition_s4() == 1


def test_class_c_rejects_u1_charges(cat):
    c, _ = cat("u1_5")
    with pytest.raises(ValueError):
        class_c_theta(c, [a * Fraction(1, 10) for a in range(10)])


def test_hall_conductance_unknown_class():
    with pytest.raises(ValueError):
        hall_conductance((0.0, 0.0), "D")


# ---- class C: sigma_H is an even integer -------------------------------------


def so3_tables(c):
    """Every fusion-consistent table with q in {0, 1/2}, q_1 = 0, q_psi = 1/2."""
    half = Fraction(1, 2)
    out = []
    for bits in itertools.product((0, half), repeat=c.n):
        if bits[0] != 0 or bits[c.fermion] != half:
            continue
        ok = all(
            (bits[a] + bits[b] - bits[k]) % 1 == 0
            for a in range(c.n)
            for b in range(c.n)
            for k in c.rules.products[a][b]
        )
        if ok:
            out.append(bits)
    return out


def test_so3_table_counts(cat):
    counts = {n: len(so3_tables(cat(n)[0])) for n in ["trivial", "u1_5", "semion_fermion", "toric_fermion"]}
    assert counts == {"trivial": 1, "u1_5": 1, "semion_fermion": 2, "toric_fermion": 4}


def test_class_c_sigma_even(cat):
    pool = [(n, q) for n in ["trivial", "u1_5", "semion_fermion", "toric_fermion"] for q in so3_tables(cat(n)[0])]
    rng = np.random.default_rng(2024)
    for i in rng.integers(len(pool), size=20):
        name, q = pool[i]
        h = hall_conductance(class_c_theta(cat(name)[0], q), "C")
        assert h.sigma == 0, (name, q)


# ---- ten-fold reports --------------------------------------------------------


@pytest.mark.parametrize("ref", CI)
def test_ci_rp4_is_real(cat, ref):
    rep = tenfold_report(*cat(ref), "CI")
    rp4 = next(r for r in rep if r.manifold == "RP4")
    assert abs(rp4.value.imag) < TOL
    assert rp4.nu in (0, 2)
    assert gaplessness_check(rep) == []


def test_tenfold_manifolds(cat):
    c, act = cat("toric_fermion/ci")
    assert [r.manifold for r in tenfold_report(c, act, "CII")] == ["RP4", "CP2", "S4"]
    assert [r.order for r in tenfold_report(c, act, "CI")] == [4, 2]


def test_tenfold_u1_class_with_so3_action(cat):
    with pytest.raises(SymmetryTypeError):
        tenfold_report(*cat("toric_fermion/ci"), "AII")


def test_tenfold_needs_charges(cat):
    with pytest.raises(ValueError):
        tenfold_report(*cat("so3_3/z2"), "CI")


@pytest.mark.parametrize("ref", ["trivial/z2", "toric_fermion/ci_eTmT"])
def test_tenfold_class_aii(cat, ref):
    c, act = cat(ref)
    q = [Fraction(int(c.times_psi(a) < a), 2) for a in range(c.n)]
    rep = tenfold_report(c, charged_action(c, act, q, "U(1)"), "AII")
    assert [r.manifold for r in rep] == ["RP4", "CP2", "S2xS2"]
    assert [r.nu for r in rep] == [int(ref.endswith("eTmT")), 0, 0]


def test_t_incompatible_charges_fall_off_grid(cat):
    # T swaps s and stilde, which cannot carry equal U(1) charges
    c, act = cat("semion_fermion/z2")
    charged = charged_action(c, act, [0, Fraction(1, 2), Fraction(1, 2), 0], "U(1)")
    with pytest.raises(OffGridError):
        tenfold_report(c, charged, "AII")


def test_unknown_class(cat):
    with pytest.raises(ValueError):
        tenfold_report(*cat("toric_fermion/ci"), "BDI")


def test_gaplessness_flags_imaginary_ci():
    fake = [IndicatorResult(1j, "Z4xZ2", 1, 4, (), "RP4"), IndicatorResult(1, "Z4xZ2", 0, 2, (), "CP2")]
    flags = gaplessness_check(fake)
    assert len(flags) == 1 and "CI" in flags[0]


def test_gaplessness_flags_cii_s4():
    fake = [IndicatorResult(-1, "Z2cubed", 1, 2, (), "S4")]
    assert gaplessness_check(fake, "CII")
    assert gaplessness_check(fake, "AII") == []
