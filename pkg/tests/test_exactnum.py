import cmath
import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from glnlocal.exactnum import (
    Cyclotomic, HalfPowerLaurent, abs_p, p_fractional_part, psi_p, to_complex, unit_part, valuation,
)

from conftest import PRIMES, rationals


def test_valuation_examples():
    assert valuation(5, 5) == 1
    assert abs_p(5, 5) == Fraction(1, 5)
    assert valuation(0, 5) == math.inf
    assert abs_p(0, 5) == 0
    assert valuation(Fraction(3, 4), 2) == -2


def test_valuation_rejects_composite():
    with pytest.raises(ValueError):
        valuation(3, 4)


@given(rationals(nonzero=True), rationals(nonzero=True), PRIMES)
def test_valuation_multiplicative(x, y, p):
    assert valuation(x * y, p) == valuation(x, p) + valuation(y, p)


@given(rationals(), rationals(), PRIMES)
def test_valuation_ultrametric(x, y, p):
    vx, vy, vs = valuation(x, p), valuation(y, p), valuation(x + y, p)
    assert vs >= min(vx, vy)
    if vx != vy:
        assert vs == min(vx, vy)


@given(rationals(nonzero=True), PRIMES)
def test_unit_part_is_unit(x, p):
    assert valuation(unit_part(x, p), p) == 0


def test_psi_examples():
    assert psi_p(Fraction(1, 2), 2) == -1
    assert psi_p(7, 3) == 1
    z4 = psi_p(Fraction(1, 4) + Fraction(1, 3), 2)
    assert z4 == Cyclotomic.root_of_unity(2, 2, 1)
    assert abs(to_complex(z4) - 1j) < 1e-15


@given(rationals(max_den=3**6), rationals(max_den=2**6 * 3), PRIMES)
def test_psi_is_a_character(x, y, p):
    assert psi_p(x + y, p) == psi_p(x, p) * psi_p(y, p)


@given(rationals(max_den=5**5), PRIMES)
def test_psi_trivial_on_integers_shift(x, p):
    assert psi_p(x + 17, p) == psi_p(x, p)
    assert psi_p(-x, p) == psi_p(x, p).conjugate()


@given(rationals(max_num=500, max_den=500), PRIMES)
def test_psi_round_trip_to_complex(x, p):
    f = p_fractional_part(x, p)
    assert 0 <= f < 1
    assert abs(to_complex(psi_p(x, p)) - cmath.exp(2j * math.pi * float(f))) <= 1e-12


def test_to_complex_examples():
    assert to_complex(Fraction(3, 4)) == 0.75
    assert to_complex(Cyclotomic.root_of_unity(2, 1, 1)) == pytest.approx(-1.0)
    assert HalfPowerLaurent.monomial(2, 1).to_complex() == pytest.approx(math.sqrt(2), abs=1e-15)


def test_cyclotomic_reduction():
    # 1 + z + ... + z^{p-1} = 0 for a primitive p-th root z
    p = 5
    z = Cyclotomic.root_of_unity(p, 1, 1)
    acc = Cyclotomic.rational(1)
    s = Cyclotomic.rational(1)
    for _ in range(p - 1):
        acc = acc * z
        s = s + acc
    assert s == 0


@given(st.integers(-12, 12), st.integers(-12, 12), PRIMES)
def test_half_powers_add_exponents(a, b, p):
    x = HalfPowerLaurent.monomial(p, a)
    y = HalfPowerLaurent.monomial(p, b)
    assert x * y == HalfPowerLaurent.monomial(p, a + b)
    assert abs((x * y).to_complex() - p ** ((a + b) / 2)) <= 1e-9 * p ** ((a + b) / 2)


def test_half_power_square_is_rational():
    r = HalfPowerLaurent.monomial(3, 1)
    assert r * r == 3
    assert (r * r).terms == {0: Fraction(3)}


def test_half_power_division():
    x = HalfPowerLaurent.monomial(2, 3, Fraction(5))
    assert (x / x) == 1
    with pytest.raises(ValueError):
        x / (x + 1)
