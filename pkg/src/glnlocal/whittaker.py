"""Unramified p-adic Whittaker functions and the local integrals built on them.

The spherical Whittaker function is evaluated on torus points through the
Schur-polynomial formula

    W(p^lam) = delta_B(p^lam)^{1/2} s_lam(t)      (lam dominant, else 0),

normalised by W(1) = 1.  Everything else (zeta integrals, the mirabolic inner
product, the truncated Jacquet integral) is a lattice or cell sum over it.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .exactnum import HalfPowerLaurent, _check_prime, psi_p, to_complex, valuation
from .padiclinalg import ExactMatrix, as_matrix, iwasawa_qp
from .symfun import LaurentPoly, is_dominant, schur, schur_numeric_batch

log = logging.getLogger(__name__)

FLAG_TOL = 1e-12


@dataclass(frozen=True)
class SatakeParam:
    """Satake parameters t_1..t_n of an unramified principal series at p."""

    p: int
    t: tuple

    def __post_init__(self):
        _check_prime(self.p)
        t = tuple(complex(x) for x in self.t)
        if any(x == 0 for x in t):
            raise ValueError("Satake parameters must be nonzero")
        object.__setattr__(self, "t", t)

    @classmethod
    def from_nu(cls, p: int, nu) -> "SatakeParam":
        """t_j = p^{-nu_j}."""
        return cls(p, tuple(p ** (-complex(v)) for v in nu))

    @property
    def n(self) -> int:
        return len(self.t)

    @property
    def trivial_central(self) -> bool:
        return abs(np.prod(self.t) - 1) <= FLAG_TOL

    @property
    def unitary_generic(self) -> bool:
        # multiset {conj t_j} == {1/t_j}: greedy matching up to FLAG_TOL
        left = [x.conjugate() for x in self.t]
        right = [1 / x for x in self.t]
        for a in left:
            j = min(range(len(right)), key=lambda i: abs(right[i] - a))
            if abs(right[j] - a) > FLAG_TOL * max(1.0, abs(a)):
                return False
            right.pop(j)
        return True

    @property
    def tempered(self) -> bool:
        return all(abs(abs(x) - 1) <= FLAG_TOL for x in self.t)

    def conjugate(self) -> "SatakeParam":
        return SatakeParam(self.p, tuple(x.conjugate() for x in self.t))

    def permuted(self, perm) -> "SatakeParam":
        return SatakeParam(self.p, tuple(self.t[i] for i in perm))

    def array(self) -> np.ndarray:
        return np.asarray(self.t, dtype=complex)


def _values(t):
    return t.t if isinstance(t, SatakeParam) else tuple(t)


def rho(m: int) -> tuple:
    """Half-sum of positive roots for GL(m): ((m + 1 - 2j)/2)_j."""
    return tuple(Fraction(m + 1 - 2 * j, 2) for j in range(1, m + 1))


def delta_B_half(lam, p: int, m: int | None = None) -> HalfPowerLaurent:
    """delta_B(p^lam)^{1/2} = p^{-sum_j lam_j (m - 2j + 1)/2}, exact."""
    lam = tuple(int(x) for x in lam)
    m = len(lam) if m is None else m
    if len(lam) != m:
        raise ValueError("cocharacter length does not match the rank")
    e2 = -sum(l * (m - 2 * j + 1) for j, l in enumerate(lam, start=1))
    return HalfPowerLaurent.monomial(p, e2)


def delta_B_half_numeric(lam, p: int) -> float:
    m = len(lam)
    e2 = -sum(int(l) * (m - 2 * j + 1) for j, l in enumerate(lam, start=1))
    return p ** (e2 / 2)


def cs_value(t, lam, p: int | None = None):
    """Spherical Whittaker value at p^lam.

    With numeric Satake parameters the result is a complex number; with a
    list of LaurentPoly generators it is a LaurentPoly whose coefficients are
    exact HalfPowerLaurent numbers.
    """
    lam = tuple(int(x) for x in lam)
    if isinstance(t, SatakeParam):
        p = t.p if p is None else p
    if p is None:
        raise ValueError("prime required")
    vals = _values(t)
    if len(vals) != len(lam):
        raise ValueError("cocharacter length does not match the number of parameters")
    symbolic = any(isinstance(x, LaurentPoly) for x in vals)
    if not is_dominant(lam):
        return LaurentPoly(vals[0].vars) if symbolic else 0j
    if symbolic:
        return schur(lam, list(vals)) * delta_B_half(lam, p)
    s = schur_numeric_batch(np.asarray([lam]), np.asarray(vals, dtype=complex))[0]
    return complex(s) * delta_B_half_numeric(lam, p)


def whittaker_at(t, g, p: int | None = None, exact: bool = False):
    """W(g) via g = u tau k: psi_p(sum u_{j,j+1}) * W(tau).

    With exact=True (or symbolic t) the psi-phase is kept as a cyclotomic
    number; otherwise everything is complex.
    """
    if isinstance(t, SatakeParam):
        p = t.p if p is None else p
    g = as_matrix(g)
    data = iwasawa_qp(g, p)
    if any(u != 1 for u in data.units):
        log.debug("discarding torus unit parts %s", data.units)
    lam = data.exponents
    n = g.nrows
    phase = psi_p(sum((data.u[j, j + 1] for j in range(n - 1)), Fraction(0)), p)
    w = cs_value(t, lam, p)
    symbolic = isinstance(w, LaurentPoly)
    if exact or symbolic:
        return w * phase
    return complex(w) * to_complex(phase)


def local_L(s, t) -> complex:
    """prod_j (1 - t_j p^{-s})^{-1}."""
    p = t.p
    out = 1 + 0j
    for x in t.t:
        f = 1 - x * p ** (-complex(s))
        if abs(f) < 1e-300:
            raise ZeroDivisionError("local L-factor has a pole here")
        out /= f
    return out


def rs_L(s, t, t2) -> complex:
    """Rankin-Selberg factor prod_{i,j} (1 - t_i t2_j p^{-s})^{-1}."""
    if t.p != t2.p:
        raise ValueError("parameters at different primes")
    p = t.p
    out = 1 + 0j
    for a in t.t:
        for b in t2.t:
            f = 1 - a * b * p ** (-complex(s))
            if abs(f) < 1e-300:
                raise ZeroDivisionError("Rankin-Selberg factor has a pole here")
            out /= f
    return out


def zeta_p(s, p: int) -> complex:
    return 1 / (1 - p ** (-complex(s)))


class Truncation(NamedTuple):
    value: complex
    reference: complex
    error: float


def dominant_box(r: int, bound: int, nonnegative: bool = True) -> np.ndarray:
    """Dominant lam in Z^r with consecutive gaps <= bound and 0 <= lam_r <= bound."""
    if r == 0:
        return np.zeros((1, 0), dtype=np.int64)
    if not nonnegative:
        raise NotImplementedError("only the non-negative cone is summed")
    rng = np.arange(bound + 1, dtype=np.int64)
    grids = np.meshgrid(*([rng] * r), indexing="ij")
    steps = np.stack([g.ravel() for g in grids], axis=1)
    # lam_i = sum_{k >= i} steps_k : steps[:, r-1] is lam_r, the rest are gaps
    return np.cumsum(steps[:, ::-1], axis=1)[:, ::-1]


def _pad_zero(lams: np.ndarray) -> np.ndarray:
    return np.concatenate([lams, np.zeros((lams.shape[0], 1), dtype=np.int64)], axis=1)


def zeta_truncated(z, nu, t: SatakeParam, bound: int) -> Truncation:
    """Truncated local zeta integral of W(nu) against conj W(t) at |det|^{z-1/2}.

    Reduces to sum_lam s_lam(p^{-nu}) conj(s_(lam,0)(t)) p^{-z|lam|}; the
    reference is prod_j L(z + nu_j, conj t).
    """
    p = t.p
    nu = tuple(complex(v) for v in nu)
    if len(nu) != t.n - 1:
        raise ValueError("need n - 1 spectral parameters")
    x = np.asarray([p ** (-v) for v in nu])
    rate = max(abs(a) * abs(b) for a in x for b in t.t) * p ** (-complex(z).real)
    if rate >= 1:
        raise ValueError("Re z too small for the lattice sum to converge")
    lams = dominant_box(t.n - 1, bound)
    s_nu = schur_numeric_batch(lams, x)
    s_t = schur_numeric_batch(_pad_zero(lams), t.array())
    weight = np.exp(-complex(z) * math.log(p) * lams.sum(axis=1))
    value = complex(np.sum(s_nu * np.conj(s_t) * weight))
    tb = t.conjugate()
    ref = 1 + 0j
    for v in nu:
        ref *= local_L(complex(z) + v, tb)
    return Truncation(value, ref, abs(value - ref))


def mirabolic_inner_truncated(t: SatakeParam, bound: int) -> Truncation:
    """<W, W> over the mirabolic quotient, truncated; reference L(1, t x conj t).

    Torus reduction: zeta_p(n) sum_lam |s_(lam,0)(t)|^2 p^{-|lam|}.
    """
    p, n = t.p, t.n
    lams = dominant_box(n - 1, bound)
    s_t = schur_numeric_batch(_pad_zero(lams), t.array())
    weight = float(p) ** (-lams.sum(axis=1).astype(float))
    value = complex(zeta_p(n, p) * np.sum(np.abs(s_t) ** 2 * weight))
    ref = rs_L(1, t, t.conjugate())
    return Truncation(value, ref, abs(value - ref))


def convergence_ratios(fn, bounds) -> list:
    """Successive error ratios err(bound_{i+1}) / err(bound_i)."""
    errs = [fn(b).error for b in bounds]
    return [b / a if a else 0.0 for a, b in zip(errs, errs[1:])]


# ---------------------------------------------------------------------------
# Jacquet integral over the unipotent radical of GL(m), m = n - 1


def units_mod_level(N: int, p: int) -> int:
    """#(Z_p^x / (1 + N Z_p)) (the whole unit group when p does not divide N)."""
    v = valuation(Fraction(N), p)
    return (p - 1) * p ** (v - 1) if v >= 1 else 1


def spherical_section(g, nu, p: int) -> complex:
    """exp<H(g), nu + rho> for the spherical vector of the principal series."""
    data = iwasawa_qp(g, p)
    m = len(data.exponents)
    r = rho(m)
    expo = sum(-a * (complex(v) + float(rh)) for a, v, rh in zip(data.exponents, nu, r))
    return complex(np.exp(expo * math.log(p)))


def jacquet_reference(nu, p: int, N: int = 1) -> complex:
    m = len(nu)
    ref = 1 + 0j
    for i in range(m):
        for j in range(i + 1, m):
            ref *= 1 - p ** (-1 - (complex(nu[i]) - complex(nu[j])))
    return ref / units_mod_level(N, p)


def jacquet_truncated(nu, p: int, k: int, N: int = 1) -> Truncation:
    """Cell sum of f(w_l u) conj psi(u) over U(p^-k Z_p)/U(Z_p) in GL(len(nu)).

    f is the spherical section at nu; the longest Weyl element is the
    antidiagonal permutation. Requires Re(nu_i - nu_j) > 1 for i < j.
    """
    _check_prime(p)
    nu = tuple(complex(v) for v in nu)
    m = len(nu)
    for i in range(m):
        for j in range(i + 1, m):
            if (nu[i] - nu[j]).real <= 1:
                raise ValueError("nu outside the convergence cone Re(nu_i - nu_j) > 1")
    w = ExactMatrix([[Fraction(int(i + j == m - 1)) for j in range(m)] for i in range(m)])
    positions = [(i, j) for i in range(m) for j in range(i + 1, m)]
    q = p**k
    reps = [Fraction(a, q) for a in range(q)]
    total = 0j
    for vals in itertools.product(reps, repeat=len(positions)):
        u = [[Fraction(int(i == j)) for j in range(m)] for i in range(m)]
        for (i, j), v in zip(positions, vals):
            u[i][j] = v
        u = ExactMatrix(u)
        phase = to_complex(psi_p(sum((u[i, i + 1] for i in range(m - 1)), Fraction(0)), p))
        total += spherical_section(w @ u, nu, p) * phase.conjugate()
    value = total / units_mod_level(N, p)
    ref = jacquet_reference(nu, p, N)
    return Truncation(value, ref, abs(value - ref))
