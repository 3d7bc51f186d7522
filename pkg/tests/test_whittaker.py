import itertools
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from glnlocal.exactnum import HalfPowerLaurent, psi_p, to_complex
from glnlocal.padiclinalg import ExactMatrix
from glnlocal.symfun import laurent_variables
from glnlocal.whittaker import (
    SatakeParam, convergence_ratios, cs_value, delta_B_half, jacquet_truncated, local_L,
    mirabolic_inner_truncated, rho, rs_L, units_mod_level, whittaker_at, zeta_p, zeta_truncated,
)


def _tempered(rng, p, n):
    a = rng.uniform(-np.pi, np.pi, n - 1)
    return SatakeParam(p, tuple(np.exp(1j * a)) + (np.exp(-1j * a.sum()),))


def test_satake_flags():
    t = SatakeParam(2, (1, 1, 1))
    assert t.trivial_central and t.unitary_generic and t.tempered
    c = SatakeParam(3, (2 ** -0.3, 2 ** 0.3, 1))
    assert c.unitary_generic and not c.tempered
    assert not SatakeParam(3, (2, 1, 0.5j)).unitary_generic
    with pytest.raises(ValueError):
        SatakeParam(2, (1, 0))


def test_delta_examples():
    assert delta_B_half((0, 0, 0), 2) == HalfPowerLaurent.monomial(2, 0)
    assert delta_B_half((1, 0), 5) == HalfPowerLaurent.monomial(5, -1)


@given(st.lists(st.integers(-6, 6), min_size=2, max_size=4))
def test_delta_matches_y_coordinates(lam):
    # in gap coordinates the exponent weights gap j by j(m - j) and ignores the central direction
    m = len(lam)
    e2 = -sum(l * (m - 2 * j + 1) for j, l in enumerate(lam, start=1))
    gaps = [lam[j] - lam[j + 1] for j in range(m - 1)]
    via_gaps = -sum(g * (j + 1) * (m - j - 1) for j, g in enumerate(gaps))
    assert e2 == via_gaps
    assert sum(rho(m)) == 0


def test_cs_value_examples():
    t = SatakeParam(2, (0.3 + 0.1j, 1.7, 1 / (1.7 * (0.3 + 0.1j))))
    assert cs_value(t, (0, 0, 0)) == 1
    assert cs_value(t, (0, 1, 0)) == 0
    t2 = SatakeParam(2, (0.4j, 2.5))
    assert abs(cs_value(t2, (1, 0)) - 2 ** -0.5 * (0.4j + 2.5)) < 1e-14


def test_cs_value_symbolic_matches_numeric():
    names, T = laurent_variables(3)
    sym = cs_value(T, (2, 1, 0), p=3)
    vals = [0.5 + 0.2j, -1.1, 0.7j]
    num = cs_value(SatakeParam(3, vals), (2, 1, 0))
    got = sym.evaluate_numeric(vals)
    assert abs(complex(got) - num) < 1e-12


@settings(max_examples=30)
@given(st.integers(0, 10**6))
def test_symmetry_under_permutation(seed):
    rng = np.random.default_rng(seed)
    t = SatakeParam(3, tuple(rng.normal(size=3) + 1j * rng.normal(size=3) + 0.1))
    for perm in itertools.permutations(range(3)):
        s = t.permuted(perm)
        assert abs(cs_value(s, (3, 1, -1)) - cs_value(t, (3, 1, -1))) < 1e-9 * max(1, abs(cs_value(t, (3, 1, -1))))
        assert abs(local_L(2.0, s) - local_L(2.0, t)) < 1e-12 * abs(local_L(2.0, t))


def test_whittaker_identity_and_integral_unipotent():
    t = SatakeParam(2, (1j, -1j, 1))
    assert whittaker_at(t, ExactMatrix.identity(3)) == 1
    assert abs(whittaker_at(t, [[1, 5, -3], [0, 1, 7], [0, 0, 1]]) - 1) < 1e-15


def test_whittaker_phase_at_inverse_p():
    t = SatakeParam(3, (1, 1, 1))
    val = whittaker_at(t, [[1, 0, 0], [0, 1, Fraction(1, 3)], [0, 0, 1]])
    assert abs(abs(val) - 1) < 1e-12
    assert abs(val ** 3 - 1) < 1e-12 and abs(val - 1) > 0.5


def _random_upper(rng, n, p):
    return ExactMatrix([[Fraction(rng.randint(-5, 5), p ** rng.randint(0, 2)) if j > i else Fraction(int(i == j))
                         for j in range(n)] for i in range(n)])


def _random_k(rng, n, p):
    while True:
        k = ExactMatrix([[Fraction(rng.randint(-6, 6)) for _ in range(n)] for _ in range(n)])
        if k.det() and k.in_GL_Zp(p):
            return k


@settings(max_examples=30)
@given(st.integers(0, 10**6), st.sampled_from([2, 3]))
def test_whittaker_equivariance(seed, p):
    rng = random.Random(seed)
    n = 3
    g = ExactMatrix([[Fraction(rng.randint(-9, 9), p ** rng.randint(0, 2)) for _ in range(n)] for _ in range(n)])
    if not g.det():
        return
    names, T = laurent_variables(n)
    base = whittaker_at(T, g, p=p)
    assert whittaker_at(T, g @ _random_k(rng, n, p), p=p) == base
    t = SatakeParam(p, (0.6 + 0.2j, 1.3, 1 / ((0.6 + 0.2j) * 1.3)))
    u = _random_upper(rng, n, p)
    phase = to_complex(psi_p(u[0, 1] + u[1, 2], p))
    lhs = whittaker_at(t, u @ g)
    rhs = phase * whittaker_at(t, g)
    assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(rhs))


def test_local_factors():
    assert abs(local_L(2, SatakeParam(3, (1,))) - zeta_p(2, 3)) < 1e-15
    assert abs(local_L(1, SatakeParam(2, (1, 1, 1))) - 8) < 1e-12
    with pytest.raises(ZeroDivisionError):
        local_L(0, SatakeParam(2, (1,)))


def test_adjoint_factorization_consistency():
    rng = np.random.default_rng(2)
    for _ in range(10):
        t = _tempered(rng, 3, 3)
        full = rs_L(1, t, t.conjugate())
        # the diagonal terms t_i conj t_i = 1 contribute zeta_p(1)^n
        off = 1 + 0j
        for i in range(3):
            for j in range(3):
                if i != j:
                    off /= 1 - t.t[i] * t.t[j].conjugate() / 3
        assert abs(full - zeta_p(1, 3) ** 3 * off) < 1e-12 * abs(full)
        adj = full / zeta_p(1, 3)
        assert abs(adj.imag) < 1e-12 * abs(adj) and adj.real > 0


def test_zeta_trivial_example():
    tr = zeta_truncated(1, (0, 0), SatakeParam(2, (1, 1, 1)), 40)
    assert abs(tr.reference - 64) < 1e-12
    assert tr.error <= 1e-7


def test_zeta_random_tempered():
    rng = np.random.default_rng(8)
    for p in (2, 3):
        t = _tempered(rng, p, 3)
        tr = zeta_truncated(1, (0.25, -0.25), t, 40)
        assert tr.error <= 1e-7
        swapped = zeta_truncated(1, (-0.25, 0.25), t, 40)
        assert abs(swapped.value - tr.value) < 1e-12 * abs(tr.value)


def test_zeta_rejects_divergent():
    with pytest.raises(ValueError):
        zeta_truncated(-0.5, (0, 0), SatakeParam(2, (1, 1, 1)), 10)


def test_mirabolic_trivial():
    tr = mirabolic_inner_truncated(SatakeParam(2, (1, 1, 1)), 40)
    assert abs(tr.reference - 512) < 1e-9
    assert tr.error / abs(tr.reference) <= 1e-6


def test_mirabolic_positive_and_decaying():
    rng = np.random.default_rng(4)
    t = _tempered(rng, 3, 3)
    tr = mirabolic_inner_truncated(t, 20)
    assert abs(tr.value.imag) < 1e-12 and tr.value.real > 0
    ratios = convergence_ratios(lambda b: mirabolic_inner_truncated(t, b), [5, 10, 20])
    assert all(r <= 0.5 for r in ratios)


def test_zeta_error_decays():
    t = SatakeParam(2, (1j, -1j, 1))
    ratios = convergence_ratios(lambda b: zeta_truncated(1.5, (0.1, -0.1), t, b), [4, 8, 16])
    assert all(r <= 0.5 for r in ratios)


def test_units_mod_level():
    assert units_mod_level(1, 5) == 1
    assert units_mod_level(7, 5) == 1
    assert units_mod_level(25, 5) == 20
    assert units_mod_level(8, 2) == 4


def test_jacquet_gl2():
    tr = jacquet_truncated((1.5, -1.5), 2, 6)
    assert abs(tr.reference - (1 - 2.0 ** -4)) < 1e-15
    assert tr.error <= 1e-8
    tr4 = jacquet_truncated((1.5, -1.5), 2, 6, N=4)
    assert abs(tr4.reference - tr.reference / 2) < 1e-15
    assert tr4.error <= 1e-8


def test_jacquet_gl2_nu_difference_two():
    tr = jacquet_truncated((1, -1), 2, 8)
    assert abs(tr.reference - 7 / 8) < 1e-15
    assert tr.error <= 1e-2


def test_jacquet_gl3():
    tr = jacquet_truncated((1.5, 0, -1.5), 2, 3)
    assert tr.error <= 1e-5


def test_jacquet_cone():
    with pytest.raises(ValueError):
        jacquet_truncated((0.4, 0), 2, 3)
