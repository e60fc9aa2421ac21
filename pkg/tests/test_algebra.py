import cmath
import math
from fractions import Fraction

import numpy as np
import pytest

from smtc_anomaly.algebra import (
    central_charge,
    check_super_modular,
    muger_center,
    quantum_dimension,
    s_matrix,
    total_dimension,
    twists,
)

from conftest import SUPER


def test_so33_dimensions_and_twists(cat):
    c, _ = cat("so3_3")
    d = quantum_dimension(c)
    assert d[c.idx("s")] == pytest.approx(1 + math.sqrt(2), abs=1e-9)
    assert total_dimension(c) ** 2 == pytest.approx(8 + 4 * math.sqrt(2), abs=1e-9)
    assert np.allclose(twists(c), [1, 1j, -1j, -1], atol=1e-9)


def test_u1_5_twists_match_closed_form(cat):
    c, _ = cat("u1_5")
    want = [cmath.exp(1j * math.pi * a * a / 5) for a in range(10)]
    assert np.allclose(twists(c), want, atol=1e-12)
    assert twists(c)[5] == pytest.approx(-1)


@pytest.mark.parametrize("name", SUPER)
def test_psi_flips_twist(cat, name):
    # only a transparent psi flips every twist; extensions are excluded
    c, _ = cat(name)
    th = twists(c)
    partner = [c.times_psi(a) for a in range(c.n)]
    assert np.allclose(th[partner], -th, atol=1e-9)


@pytest.mark.parametrize("name", SUPER)
def test_super_modular(cat, name):
    c, _ = cat(name)
    res = check_super_modular(c)
    assert res.report.ok, res.report.violations
    St = res.S_tilde
    assert np.abs(St @ St.conj().T - np.eye(len(St))).max() < 1e-8


@pytest.mark.parametrize(
    "name, c_expected",
    [("u1_20", Fraction(1)), ("su2_6", Fraction(9, 4)), ("zested_b", Fraction(0)), ("toric_code", Fraction(0))],
)
def test_central_charges(cat, name, c_expected):
    c, _ = cat(name)
    assert central_charge(c) == c_expected


def test_s_matrix_symmetric_and_unitary_for_modular(cat):
    c, _ = cat("su2_6")
    S = s_matrix(c)
    assert np.allclose(S, S.T)
    assert np.allclose(S @ S.conj().T, np.eye(c.n), atol=1e-10)
    assert muger_center(c) == [0]


def test_gauss_sum_not_a_phase_for_super_modular(cat):
    from smtc_anomaly.algebra import NotModularError

    c, _ = cat("semion_fermion")
    with pytest.raises(NotModularError):
        central_charge(c)
