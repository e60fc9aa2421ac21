import cmath
import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_form

from smtc_anomaly._phases import LinearSystem, PrecisionError, solve_mod1, to_turns


def residual(A, x, v):
    return [(sum(int(a) * xi for a, xi in zip(row, x)) - vi) % 1 for row, vi in zip(A, v)]


fractions = st.builds(Fraction, st.integers(0, 47), st.sampled_from([1, 2, 3, 4, 6, 8, 12, 16, 48]))


@st.composite
def planted(draw):
    m = draw(st.integers(1, 6))
    n = draw(st.integers(1, 5))
    A = np.array(draw(st.lists(st.lists(st.integers(-2, 2), min_size=n, max_size=n), min_size=m, max_size=m)))
    x = draw(st.lists(fractions, min_size=n, max_size=n))
    v = [sum(int(a) * xi for a, xi in zip(row, x)) % 1 for row in A]
    return A, v


@settings(max_examples=300)
@given(planted())
def test_planted_systems_are_solved(case):
    A, v = case
    x = solve_mod1(A, v)
    assert x is not None
    assert not any(residual(A, x, v))
    assert all(0 <= xi < 1 for xi in x)


def smith_grid(A, den):
    """Denominator that a solution can always be found on, if any exists."""
    D = smith_normal_form(Matrix(A.tolist()), domain=ZZ)
    divisors = [abs(int(D[i, i])) for i in range(min(D.shape)) if D[i, i] != 0]
    return den * math.lcm(1, *divisors)


def brute(A, v, den):
    L = smith_grid(A, den)
    for x in itertools.product(range(L), repeat=A.shape[1]):
        xs = [Fraction(t, L) for t in x]
        if not any(residual(A, xs, v)):
            return xs
    return None


small = st.tuples(
    st.integers(1, 3).flatmap(
        lambda m: st.lists(st.lists(st.integers(-2, 2), min_size=2, max_size=2), min_size=m, max_size=m)
    ),
    st.lists(st.integers(0, 5), min_size=3, max_size=3),
)


@settings(max_examples=150)
@given(small, st.sampled_from([2, 3, 4, 6]))
def test_agrees_with_brute_force(case, den):
    rows, nums = case
    A = np.array(rows)
    v = [Fraction(k, den) for k in nums[: len(rows)]]
    got = solve_mod1(A, v)
    oracle = brute(A, v, den)
    assert (got is None) == (oracle is None)
    if got is not None:
        assert not any(residual(A, got, v))


def test_inconsistent_examples():
    # x = 1/3 forces 2x = 2/3
    assert solve_mod1(np.array([[1], [2]]), [Fraction(1, 3), Fraction(1, 2)]) is None
    # the same row asked to equal two things
    assert solve_mod1(np.array([[1, 1], [1, 1]]), [0, Fraction(1, 2)]) is None
    # 0 = 1/4
    assert solve_mod1(np.array([[0, 0]]), [Fraction(1, 4)]) is None


def test_empty_system():
    assert solve_mod1(np.zeros((0, 3), dtype=int), []) == [0, 0, 0]


def test_large_coefficients_refused():
    with pytest.raises(PrecisionError):
        solve_mod1(np.array([[1000]]), [Fraction(1, 2)])


def test_linear_system_named_unknowns():
    sys = LinearSystem()
    sys.add([("u", 2)], Fraction(1, 2))
    sys.add([("u", 1), ("w", -1)], Fraction(1, 8))
    sol = sys.solve()
    assert (2 * sol["u"]) % 1 == Fraction(1, 2)
    assert (sol["u"] - sol["w"]) % 1 == Fraction(1, 8)


def test_linear_system_collects_repeated_terms():
    sys = LinearSystem()
    sys.add([("a", 1), ("a", 1)], Fraction(1, 3))
    assert sys.matrix().tolist() == [[2]]
    sys.add([("a", 1), ("a", -1)], Fraction(1, 5))
    assert sys.solve() is None


@given(st.integers(0, 95))
def test_to_turns_roots_of_unity(k):
    assert to_turns(cmath.exp(2j * math.pi * k / 96)) == Fraction(k, 96)


def test_to_turns_rejects():
    with pytest.raises(ValueError):
        to_turns(0.5)
    with pytest.raises(ValueError):
        to_turns(cmath.exp(1j))
