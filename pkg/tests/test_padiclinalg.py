import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from glnlocal.exactnum import valuation
from glnlocal.padiclinalg import (
    ExactMatrix, arch_gram_residual, arch_lower_iwasawa, explicit_lower_iwasawa, in_ZK1,
    iwasawa_qp, lower_unipotent, smith_at_p, support_indicator, support_necessary_conditions,
    vanishing_fuzz, vanishing_requirement,
)
from glnlocal.weylcoset import Permutation, admissible_triples, coset_parametrization, support, w0_of



def _rand_q(rng, p, spread=3):
    return Fraction(rng.randint(-20, 20), p ** rng.randint(0, spread) * rng.choice([1, 1, 3, 7]))


def _rand_gl(rng, n, p):
    while True:
        g = ExactMatrix([[_rand_q(rng, p) for _ in range(n)] for _ in range(n)])
        if g.det():
            return g


def _rand_gl_zp(rng, n, p):
    while True:
        k = ExactMatrix([[Fraction(rng.randint(-9, 9), rng.choice([1, p + 1 if p == 2 else 2])) for _ in range(n)]
                         for _ in range(n)])
        if k.det() and k.in_GL_Zp(p):
            return k


def test_exact_matrix_basics():
    A = ExactMatrix([[1, 2], [3, 4]])
    assert A.det() == -2
    assert A @ A.inverse() == ExactMatrix.identity(2)
    assert A.T == ExactMatrix([[1, 3], [2, 4]])
    with pytest.raises(ZeroDivisionError):
        ExactMatrix([[1, 2], [2, 4]]).inverse()


@settings(max_examples=40)
@given(st.integers(0, 10**6), st.integers(2, 5))
def test_det_matches_elimination(seed, n):
    rng = random.Random(seed)
    A = ExactMatrix([[Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(n)] for _ in range(n)])
    ref = np.linalg.det(A.to_numpy().astype(float))
    assert abs(float(A.det()) - ref) <= 1e-9 * max(1.0, abs(ref))


def test_iwasawa_trivial_cases():
    g = ExactMatrix([[1, 2], [3, 7]])
    d = iwasawa_qp(g, 5)
    assert d.exponents == (0, 0)
    d = iwasawa_qp(ExactMatrix.diag([2, 1]), 2)
    assert d.exponents == (1, 0)
    assert d.u @ d.t @ d.k == ExactMatrix.diag([2, 1])


def test_iwasawa_lower_unipotent_2x2():
    xi = Fraction(5, 8)
    d = iwasawa_qp([[1, 0], [xi, 1]], 2)
    assert d.abs_t(2) == (Fraction(1, 8), Fraction(8))


@settings(max_examples=40)
@given(st.integers(0, 10**6), st.sampled_from([2, 3, 5]), st.integers(2, 4))
def test_iwasawa_reconstruction_and_invariance(seed, p, n):
    rng = random.Random(seed)
    g = _rand_gl(rng, n, p)
    d = iwasawa_qp(g, p)
    assert d.u @ d.t @ d.k == g
    assert d.u.is_upper_unipotent()
    assert d.k.in_GL_Zp(p)
    k = _rand_gl_zp(rng, n, p)
    assert iwasawa_qp(g @ k, p).exponents == d.exponents


def test_iwasawa_singular():
    with pytest.raises(ValueError):
        iwasawa_qp([[1, 1], [1, 1]], 3)


def test_explicit_integral_case():
    d = explicit_lower_iwasawa([1, 4, -3], 2)
    assert d.t == 1 and d.ell == (0, 0, 0) and d.alpha == (1, 1, 1)
    assert d.upsilon == ExactMatrix.identity(3)


def test_explicit_single_coordinate():
    xi = Fraction(3, 4)
    d = explicit_lower_iwasawa([xi], 2)
    assert d.alpha == (-1 / xi,) and d.t == xi


@settings(max_examples=60)
@given(st.integers(0, 10**6), st.sampled_from([2, 3, 5]), st.integers(1, 4))
def test_explicit_lower_iwasawa_properties(seed, p, r):
    rng = random.Random(seed)
    xi = [_rand_q(rng, p) for _ in range(r)]
    d = explicit_lower_iwasawa(xi, p)
    assert d.upper() @ d.torus() @ d.kappa == lower_unipotent(xi)
    assert d.kappa.in_GL_Zp(p)
    assert all(valuation(l * d.t, p) >= 0 for l in d.ell if l)
    ya = d.upsilon @ ExactMatrix.diag(d.alpha)
    assert ya.is_p_integral(p)
    generic = iwasawa_qp(lower_unipotent(xi), p)
    assert generic.abs_t(p) == tuple(Fraction(p) ** (-valuation(a, p)) for a in list(d.alpha) + [d.t])


def test_explicit_orthogonality_off_support():
    rng = random.Random(4)
    for p in (2, 3):
        for _ in range(50):
            # the minus part lives on the coordinate where the plus part vanishes
            plus = [_rand_q(rng, p), Fraction(0), _rand_q(rng, p)]
            d = explicit_lower_iwasawa(plus, p)
            minus = [Fraction(0), _rand_q(rng, p), Fraction(0)]
            assert sum(a * b for a, b in zip(minus, d.ell)) == 0
            ya = d.upsilon @ ExactMatrix.diag(d.alpha)
            assert tuple(ya.T.apply(minus)) == tuple(minus)


def test_arch_closed_forms():
    d = arch_lower_iwasawa([0.0, 0.0])
    assert d.t == 1 and np.allclose(d.ell, 0) and np.allclose(d.alpha, 1)
    z = 1.7
    d = arch_lower_iwasawa([z])
    assert abs(d.t - np.sqrt(1 + z * z)) < 1e-15
    assert abs(d.alpha[0] - 1 / np.sqrt(1 + z * z)) < 1e-15


def test_arch_gram_and_isometry():
    rng = np.random.default_rng(0)
    for _ in range(50):
        plus = rng.normal(size=4) * 3
        plus[rng.integers(4)] = 0.0
        d = arch_lower_iwasawa(plus)
        assert arch_gram_residual(d, plus) <= 1e-12
        nbar = np.eye(5)
        nbar[4, :4] = plus
        up = np.eye(5)
        up[:4, :4] = d.upsilon
        up[:4, 4] = d.ell
        recon = up @ np.diag(list(d.alpha) + [d.t]) @ d.kappa
        assert np.max(np.abs(recon - nbar)) < 1e-12
        assert np.max(np.abs(d.kappa @ d.kappa.T - np.eye(5))) < 1e-12
        ya = d.upsilon * d.alpha[None, :]
        assert np.linalg.norm(ya) <= 4 + 1e-12
        minus = np.where(plus == 0, rng.normal(size=4), 0.0)
        assert abs(np.linalg.norm(ya.T @ minus) - np.linalg.norm(minus)) < 1e-12


def test_smith_examples():
    assert smith_at_p(ExactMatrix.diag([2, 1]), 2) == (0, 1)
    assert smith_at_p([[3, 1], [0, 3]], 3) == (0, 2)
    assert smith_at_p(ExactMatrix.identity(3) * 5, 5) == (1, 1, 1)
    with pytest.raises(ValueError):
        smith_at_p([[Fraction(1, 2), 0], [0, 1]], 2)


@settings(max_examples=40)
@given(st.integers(0, 10**6), st.sampled_from([2, 3]))
def test_smith_invariant_under_units(seed, p):
    rng = random.Random(seed)
    A = ExactMatrix([[Fraction(rng.randint(-12, 12)) for _ in range(3)] for _ in range(3)])
    if not A.det():
        return
    ex = smith_at_p(A, p)
    assert sum(ex) == valuation(A.det(), p)
    assert list(ex) == sorted(ex)
    assert smith_at_p(_rand_gl_zp(rng, 3, p) @ A @ _rand_gl_zp(rng, 3, p), p) == ex


def test_in_ZK1_examples():
    ok, z = in_ZK1(1, [[0, 1], [1, 0]], 3)
    assert ok and z == 1
    ok, z = in_ZK1(1, [[1, 1], [0, 1]], 3)
    assert ok and z == 1
    ok, z = in_ZK1(5, ExactMatrix.identity(3) * 3, 3)
    assert ok and z == 3
    ok, _ = in_ZK1(1, [[1, Fraction(1, 3)], [0, 1]], 3)
    assert not ok
    ok, z = in_ZK1(9, [[1, 0], [9, 1]], 3)
    assert ok and z == 1
    ok, _ = in_ZK1(9, [[1, 0], [3, 1]], 3)
    assert not ok


def test_indicator_true_on_integral_longest_levi():
    for n in (2, 3, 4):
        w = Permutation.longest_levi(n)
        Q = frozenset(range(1, n))
        Z = ExactMatrix.identity(n - 1)
        xi = [Fraction(k + 2) for k in range(n - 1)]
        assert support_indicator(Q, (0,) * (n - 1), w, 1, 3, Z, xi, [])


def test_corollary_counterexample_is_pinned():
    w = Permutation([3, 2, 1])
    args = ((), (6, 0), w, 1, 2, [[1, 15], [0, 1]], [], [Fraction(7, 2), Fraction(-15)])
    assert support_indicator(*args)
    assert not support_necessary_conditions(*args)["holds"]


def _samples(n, p, count, seed):
    rng = random.Random(seed)
    values = (1, p, Fraction(1, p))
    triples = [t for t in admissible_triples(n, values=values) if len(t[0]) < n - 1]
    for _ in range(count):
        Q, y, w = rng.choice(triples)
        cp = coset_parametrization(Q, y, w)
        coord = lambda: Fraction(rng.randint(-12, 12), p ** rng.randint(0, 2))  # noqa: E731
        Z = cp.V_element([coord() for _ in cp.V_roots])
        xi = [coord() for _ in range(cp.xi_dim)]
        xip = [coord() for _ in range(cp.xip_dim)]
        yield Q, y, w, Z, xi, xip, cp


def test_necessary_conditions_on_clean_slice():
    checked = 0
    for p in (2, 3):
        for Q, y, w, Z, xi, xip, cp in _samples(3, p, 600, seed=p):
            sp = support(y)
            minus = [x for k, x in enumerate(xip) if cp.w0(cp.m + k) not in sp]
            if any(y) and any(minus):
                continue
            for N in (1, p, p * p):
                if support_indicator(Q, y, w, N, p, Z, xi, xip):
                    checked += 1
                    assert support_necessary_conditions(Q, y, w, N, p, Z, xi, xip)["holds"]
    assert checked > 20


def test_indicator_monotone_in_level():
    for p in (2, 3):
        for Q, y, w, Z, xi, xip, _ in _samples(3, p, 300, seed=10 + p):
            hits = [support_indicator(Q, y, w, N, p, Z, xi, xip) for N in (p * p, p, 1)]
            assert hits == sorted(hits)


def test_vanishing_requirement():
    assert vanishing_requirement((0, 0), 2, 2)
    assert not vanishing_requirement((0, 0), 3, 2)
    assert vanishing_requirement((1, 0), 4, 2)
    assert not vanishing_requirement((4, 1), 4, 2)
    assert vanishing_requirement((0, 2), 4, 2)


@pytest.mark.parametrize("p", [2, 3])
def test_vanishing_fuzz_small(p):
    scan = vanishing_fuzz(3, p, 2000, seed=1)
    assert scan.ok and scan.forced > 1500
