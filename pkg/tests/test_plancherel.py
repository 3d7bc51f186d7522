import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import gamma

from glnlocal.oldforms import hecke_cosets
from glnlocal.plancherel import (
    TorusGrid, arch_c_bound_check, arch_density, on_hyperplane, padic_c, padic_density,
    padic_density_rational, padic_mass, padic_parseval, shift_off_hyperplanes,
)

angles = st.floats(-3.0, 3.0, allow_nan=False)


def _sum_zero(a, b):
    return np.array([a, b, -a - b])


def test_grid_nodes_sum_to_zero():
    nodes = TorusGrid(3, 3, 16).nodes()
    assert np.max(np.abs(nodes.sum(axis=1))) < 1e-14
    assert len(nodes) == 256


@given(angles, angles)
def test_padic_density_positive_and_symmetric(a, b):
    s = _sum_zero(a, b)
    d = padic_density(s, 2)
    assert d >= 0
    for perm in itertools.permutations(range(3)):
        assert abs(padic_density(s[list(perm)], 2) - d) <= 1e-12 * max(1, d)


def test_padic_density_zero_on_walls():
    assert padic_density([0.4, 0.4, -0.8], 3) == 0
    assert math.isinf(abs(padic_c([0.4, 0.4, -0.8], 3)))
    assert abs(padic_c([0.4, 0.4 + 1e-9, -0.8], 3)) > 1e8


def test_padic_density_rational_form():
    p = 2
    s = _sum_zero(0.01, 0.37)
    x = np.exp(-1j * s * math.log(p))
    assert abs(padic_density(s, p) - padic_density_rational(x, p)) < 1e-12
    assert abs(padic_density(s, p) * abs(padic_c(s, p)) ** 2 - padic_density(_sum_zero(1.1, 0.5), p)
               * abs(padic_c(_sum_zero(1.1, 0.5), p)) ** 2) < 1e-12


@pytest.mark.parametrize("p", [2, 3, 5])
def test_padic_mass(p):
    errs = [padic_mass(p, 3, k).error for k in (16, 32, 64)]
    assert errs[0] > errs[1] > errs[2] or errs[2] < 1e-14
    assert errs[2] <= 1e-6


def test_padic_mass_gl2():
    assert padic_mass(3, 2, 64).error <= 1e-10


def test_parseval_against_coset_count():
    res = padic_parseval(2, 3, 1, 128)
    assert abs(res.rhs - len(hecke_cosets(3, 1, 2)) / 2 ** 2) < 1e-15
    assert res.error <= 1e-5


def test_parseval_contragredient_symmetry():
    a = padic_parseval(3, 3, 1, 64)
    b = padic_parseval(3, 3, 2, 64)
    assert abs(a.lhs - b.lhs) < 1e-10 and a.rhs == b.rhs


def test_parseval_range():
    with pytest.raises(ValueError):
        padic_parseval(2, 3, 0)


def _gamma_R(s):
    return math.pi ** (-s / 2) * gamma(s / 2)


def test_arch_density_against_gamma():
    s = np.array([1.3, 0.2, -1.5])
    c = 1.0
    for i, j in itertools.combinations(range(3), 2):
        d = 1j * (s[i] - s[j])
        c *= abs(_gamma_R(d) / _gamma_R(d + 1))
    const = 1 / (_gamma_R(1) * _gamma_R(2) * _gamma_R(3)).real / 6
    assert abs(arch_density(s) - const / c**2) <= 1e-10 * arch_density(s)


@given(angles, angles)
def test_arch_density_symmetries(a, b):
    s = _sum_zero(a, b)
    d = arch_density(s)
    assert abs(arch_density(-s) - d) <= 1e-10 * max(1, d)
    assert abs(arch_density(s[[2, 0, 1]]) - d) <= 1e-10 * max(1, d)


def test_arch_density_zero_on_wall():
    assert arch_density([0.5, 0.5, -1.0]) == 0


def test_arch_bound_report():
    rep = arch_c_bound_check(3, radius=50, steps=60, extended=100)
    assert rep.c_bound_inf > 0
    assert rep.exponent_stable


def test_on_hyperplane():
    assert on_hyperplane((Fraction(1, 2), Fraction(-1, 2)))
    assert not on_hyperplane((Fraction(1, 3), Fraction(-1, 2)))
    assert on_hyperplane((0.25, 1.25 + 1e-14))


@pytest.mark.parametrize("nu0", [
    (Fraction(1, 5), Fraction(2, 7), Fraction(-3, 11)),
    (Fraction(1, 2), Fraction(-1, 2), Fraction(3, 2)),
    (0, 1, 2, Fraction(1, 3)),
    (0, 0, 0),
])
def test_shift_certificate(nu0):
    delta, mu, cert = shift_off_hyperplanes(nu0, samples=2000, seed=3)
    assert cert.ok and delta > 0
    for i, j in cert.on_pairs:
        assert delta / 2 < abs(mu[i] - mu[j]) < delta
    assert sum(mu) == 0


@settings(max_examples=25)
@given(st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=4), min_size=2, max_size=4))
def test_shift_never_fails(nu0):
    _, _, cert = shift_off_hyperplanes(nu0, samples=200, seed=0)
    assert cert.ok
