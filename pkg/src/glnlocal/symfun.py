"""Symmetric functions and the matrix identities built from them.

Scalars may be ints, Fractions, complex numbers, exact scalars from
``exactnum`` or ``LaurentPoly`` values; everything here only uses ring
operations unless a division is unavoidable (Vandermonde inverse).
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

# --------------------------------------------------------------------------
# Laurent polynomials


class LaurentPoly:
    """Sparse Laurent polynomial over exact (or numeric) coefficients."""

    __slots__ = ("vars", "terms")

    def __init__(self, variables, terms=None):
        self.vars = tuple(variables)
        clean = {}
        for e, c in (terms or {}).items():
            if c:
                clean[tuple(e)] = c
        self.terms = clean

    # construction ---------------------------------------------------------
    @classmethod
    def const(cls, variables, c) -> "LaurentPoly":
        return cls(variables, {(0,) * len(variables): c})

    @classmethod
    def var(cls, variables, name, power: int = 1) -> "LaurentPoly":
        variables = tuple(variables)
        e = [0] * len(variables)
        e[variables.index(name)] = power
        return cls(variables, {tuple(e): 1})

    @classmethod
    def gens(cls, variables):
        return [cls.var(variables, v) for v in variables]

    def _coerce(self, other) -> "LaurentPoly":
        if isinstance(other, LaurentPoly):
            if other.vars != self.vars:
                raise ValueError("polynomials over different variable lists")
            return other
        return LaurentPoly.const(self.vars, other)

    # ring operations --------------------------------------------------------
    def __add__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        t = dict(self.terms)
        for e, c in other.terms.items():
            t[e] = t[e] + c if e in t else c
        return LaurentPoly(self.vars, t)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, LaurentPoly):
            if not other:
                return LaurentPoly(self.vars)
            return LaurentPoly(self.vars, {e: c * other for e, c in self.terms.items()})
        other = self._coerce(other)
        t: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = c1 * c2
                t[e] = t[e] + v if e in t else v
        return LaurentPoly(self.vars, t)

    def __rmul__(self, other):
        return self * other

    def __pow__(self, k: int):
        if k < 0:
            return self.monomial_inverse() ** (-k)
        out = LaurentPoly.const(self.vars, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __truediv__(self, other):
        if isinstance(other, LaurentPoly):
            return self * other.monomial_inverse()
        return self * (Fraction(1) / other if isinstance(other, (int, Fraction)) else 1 / other)

    def monomial_inverse(self) -> "LaurentPoly":
        if len(self.terms) != 1:
            raise ValueError("only monomials are invertible")
        (e, c), = self.terms.items()
        inv = Fraction(1) / c if isinstance(c, (int, Fraction)) else 1 / c
        return LaurentPoly(self.vars, {tuple(-a for a in e): inv})

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return not (self - other).terms

    def __hash__(self):
        return hash((self.vars, frozenset(self.terms.items())))

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in sorted(self.terms.items()):
            mono = "*".join(f"{v}^{k}" if k != 1 else v for v, k in zip(self.vars, e) if k)
            parts.append(f"({c})" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)

    # inspection / evaluation ----------------------------------------------
    def is_polynomial(self) -> bool:
        return all(min(e, default=0) >= 0 for e in self.terms)

    def degree_in(self, name) -> int:
        i = self.vars.index(name)
        return max((e[i] for e in self.terms), default=-1)

    def coefficients_in(self, name) -> dict:
        """{power: LaurentPoly in the remaining positions (same var list)}."""
        i = self.vars.index(name)
        out: dict = {}
        for e, c in self.terms.items():
            k = e[i]
            e2 = e[:i] + (0,) + e[i + 1:]
            out.setdefault(k, {})[e2] = c
        return {k: LaurentPoly(self.vars, t) for k, t in out.items()}

    def evaluate(self, values):
        """Substitute values (mapping name->value or a sequence)."""
        if isinstance(values, dict):
            vals = [values[v] for v in self.vars]
        else:
            vals = list(values)
        total = 0
        for e, c in self.terms.items():
            term = c
            for x, k in zip(vals, e):
                if k:
                    term = term * (x**k)
            total = total + term
        return total

    def evaluate_numeric(self, values) -> complex:
        vals = np.asarray([complex(v) for v in (values if not isinstance(values, dict) else [values[v] for v in self.vars])])
        total = 0j
        for e, c in self.terms.items():
            total += complex(c) * np.prod(vals ** np.asarray(e))
        return complex(total)

    def permute(self, perm) -> "LaurentPoly":
        """Substitute var[i] -> var[perm[i]] (perm is a sequence of indices)."""
        t = {}
        for e, c in self.terms.items():
            e2 = [0] * len(e)
            for i, k in enumerate(e):
                e2[perm[i]] += k
            t[tuple(e2)] = c
        return LaurentPoly(self.vars, t)

    def map_coefficients(self, f) -> "LaurentPoly":
        return LaurentPoly(self.vars, {e: f(c) for e, c in self.terms.items()})

    def divide_linear(self, x: str, y: str) -> "LaurentPoly":
        """Exact quotient by (x - y); raises if the division leaves a remainder."""
        ix = self.vars.index(x)
        iy = self.vars.index(y)
        if not self.terms:
            return self
        if min(e[ix] for e in self.terms) < 0:
            raise ValueError("negative powers of the division variable")
        coeffs = self.coefficients_in(x)
        d = max(coeffs)
        yv = LaurentPoly.var(self.vars, y)
        q: dict = {}
        carry = LaurentPoly(self.vars)
        for k in range(d, 0, -1):
            carry = coeffs.get(k, LaurentPoly(self.vars)) + carry
            q[k - 1] = carry
            carry = carry * yv
        rem = coeffs.get(0, LaurentPoly(self.vars)) + carry
        if rem:
            raise ArithmeticError(f"polynomial is not divisible by ({x} - {y})")
        out = LaurentPoly(self.vars)
        xv = LaurentPoly.var(self.vars, x)
        for k, c in q.items():
            out = out + c * (xv**k)
        return out


def laurent_variables(n: int, prefix: str = "T", extra=()):
    names = tuple(f"{prefix}{i}" for i in range(1, n + 1)) + tuple(extra)
    return names, LaurentPoly.gens(names)


# --------------------------------------------------------------------------
# e, h, Schur


def _one_like(xs):
    for x in xs:
        if isinstance(x, LaurentPoly):
            return LaurentPoly.const(x.vars, 1)
    return 1


def elementary(l: int, x):
    """e_l(x); 1 for l = 0, 0 for l > len(x)."""
    if l < 0:
        raise ValueError("negative degree")
    x = list(x)
    if l > len(x):
        return 0 * _one_like(x)
    e = [_one_like(x)] + [0] * l
    for xi in x:
        for k in range(l, 0, -1):
            e[k] = e[k] + xi * e[k - 1]
    return e[l]


def elementary_all(x):
    x = list(x)
    e = [_one_like(x)] + [0] * len(x)
    for xi in x:
        for k in range(len(x), 0, -1):
            e[k] = e[k] + xi * e[k - 1]
    return e


def complete(l: int, x):
    """h_l(x); 0 for l < 0."""
    if l < 0:
        return 0 * _one_like(list(x))
    return complete_all(l, x)[l]


def complete_all(L: int, x):
    """[h_0(x), ..., h_L(x)]."""
    x = list(x)
    h = [_one_like(x)] + [0] * L
    for xi in x:
        for k in range(1, L + 1):
            h[k] = h[k] + xi * h[k - 1]
    return h


def _det_generic(m):
    """Determinant by Laplace expansion along the first row (ring only)."""
    r = len(m)
    if r == 0:
        return 1
    if r == 1:
        return m[0][0]
    if r == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    total = 0
    for j in range(r):
        if not m[0][j]:
            continue
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = m[0][j] * _det_generic(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def is_dominant(lam) -> bool:
    return all(lam[i] >= lam[i + 1] for i in range(len(lam) - 1))


def schur(lam, x):
    """Schur polynomial s_lam(x) for dominant lam with possibly negative
    parts (Laurent case: shift by the last part)."""
    lam = list(lam)
    x = list(x)
    r = len(x)
    if len(lam) < r:
        lam = lam + [0] * (r - len(lam))
    if len(lam) > r:
        if any(lam[r:]):
            return 0 * _one_like(x)
        lam = lam[:r]
    if not is_dominant(lam):
        raise ValueError("lambda must be dominant")
    if r == 0:
        return 1
    shift = lam[-1]
    mu = [a - shift for a in lam]
    h = complete_all(mu[0] + r, x)

    def hh(k):
        return h[k] if k >= 0 else 0

    jt = [[hh(mu[i] - i + j) for j in range(r)] for i in range(r)]
    s = _det_generic(jt)
    if shift:
        prod = _one_like(x)
        for xi in x:
            prod = prod * xi
        if shift > 0:
            s = s * prod**shift
        else:
            inv = prod.monomial_inverse() if isinstance(prod, LaurentPoly) else 1 / prod
            s = s * inv ** (-shift)
    return s


# --------------------------------------------------------------------------
# numeric Schur on many partitions at once


def complete_numeric(L: int, x) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    h = np.zeros(L + 1, dtype=complex)
    h[0] = 1.0
    for xi in x:
        for k in range(1, L + 1):
            h[k] += xi * h[k - 1]
    return h


def schur_numeric_batch(lams: np.ndarray, x) -> np.ndarray:
    """Vectorised Jacobi-Trudi: lams is (N, r) of dominant integer rows."""
    x = np.asarray(x, dtype=complex)
    lams = np.asarray(lams, dtype=np.int64)
    r = len(x)
    if lams.ndim != 2 or lams.shape[1] != r:
        raise ValueError("partition rows must have one entry per variable")
    if lams.shape[0] == 0:
        return np.zeros(0, dtype=complex)
    shift = lams[:, -1]
    mu = lams - shift[:, None]
    L = int(mu.max()) + r
    h = np.concatenate([np.zeros(r, dtype=complex), complete_numeric(L, x)])
    idx = mu[:, :, None] - np.arange(r)[None, :, None] + np.arange(r)[None, None, :]
    mats = h[idx + r]
    mats[idx < 0] = 0.0
    s = np.linalg.det(mats) if r > 1 else mats[:, 0, 0]
    prod = np.prod(x)
    return s * prod ** shift.astype(float)


# --------------------------------------------------------------------------
# Vandermonde family


def _hat(T, j):
    return [t for i, t in enumerate(T) if i != j]


def vandermonde(T):
    r = len(T)
    one = _one_like(T)
    return [[one * T[i] ** j if j else one for j in range(r)] for i in range(r)]


def elementary_matrix(T):
    r = len(T)
    return [[elementary(j, _hat(T, i)) for j in range(r)] for i in range(r)]


def complete_matrix(T):
    r = len(T)
    one = _one_like(T)
    hs = complete_all(r, T)
    out = []
    for i in range(r):
        row = []
        for j in range(r):
            k = j - i
            v = hs[k] if k >= 0 else 0 * one
            row.append(v if i % 2 == 0 else -v)
        out.append(row)
    return out


def vandermonde_inverse_numerators(T):
    """(N, d): V^{-1}_{ij} = N_{ij} / d_j with polynomial N and d."""
    r = len(T)
    one = _one_like(T)
    N = [[(-1) ** (r - i - 1) * elementary(r - i - 1, _hat(T, j)) for j in range(r)] for i in range(r)]
    d = []
    for j in range(r):
        prod = one
        for a in range(r):
            if a != j:
                prod = prod * (T[j] - T[a])
        d.append(prod)
    return N, d


def vandermonde_inverse(T):
    """Closed-form inverse; None when two entries coincide."""
    N, d = vandermonde_inverse_numerators(T)
    if any(not dj for dj in d):
        return None
    r = len(T)
    return [[N[i][j] / d[j] if not isinstance(d[j], int) else Fraction(N[i][j], d[j]) for j in range(r)] for i in range(r)]


def matmul(A, B):
    n, k, m = len(A), len(B), len(B[0])
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            s = 0
            for l in range(k):
                if A[i][l] and B[l][j]:
                    s = s + A[i][l] * B[l][j]
            row.append(s)
        out.append(row)
    return out


def vandermonde_factorization(T):
    """(V, E, H, V^{-1}) with V = E H; V^{-1} is None for repeated entries or
    symbolic input (see ``vandermonde_inverse_numerators``)."""
    T = list(T)
    V = vandermonde(T)
    E = elementary_matrix(T)
    H = complete_matrix(T)
    Vinv = None if any(isinstance(t, LaurentPoly) for t in T) else vandermonde_inverse(T)
    return V, E, H, Vinv


# --------------------------------------------------------------------------
# residue lemma


def residue_identity_check(F, x, nodes: int = 64, tol: float = 1e-8):
    """Contour integral over the unit torus (tensor trapezoid) against the
    residue sum.  ``F`` maps an array of shape (n-1, ...) to values; both
    sides are returned divided by (2 pi i)^{n-1}."""
    x = np.asarray(x, dtype=complex)
    n = len(x)
    if np.any(np.abs(x) >= 1):
        raise ValueError("points must lie inside the unit disc")
    for a in range(n):
        for b in range(a + 1, n):
            if abs(x[a] - x[b]) < 1e-12:
                raise ValueError("points must be pairwise distinct")
    d = n - 1
    theta = 2 * np.pi * np.arange(nodes) / nodes
    grids = np.meshgrid(*([np.exp(1j * theta)] * d), indexing="ij")
    z = np.stack(grids) if d else np.zeros((0,))
    integrand = F(z) * np.prod(z, axis=0)
    for j in range(d):
        for a in range(n):
            integrand = integrand / (z[j] - x[a])
    lhs = integrand.mean() / math.factorial(d)
    sign = (-1) ** ((d) * (d - 1) // 2)
    rhs = 0j
    for a in range(n):
        xh = np.delete(x, a)
        Dx = 1.0 + 0j
        for i in range(d):
            for j in range(i + 1, d):
                Dx *= xh[j] - xh[i]
        denom = np.prod([x[i] - x[a] for i in range(n) if i != a])
        val = complex(np.asarray(F(xh)).reshape(-1)[0])
        rhs += sign * val / (Dx**2 * denom)
    return complex(lhs), complex(rhs), bool(abs(lhs - rhs) <= tol)


# --------------------------------------------------------------------------
# the D, D*, P_m, P* matrices


def _q_factor(Z, Ta, T):
    prod = 1
    for Tb in T:
        prod = prod * (1 - Z * Ta / Tb)
    return prod


def d_matrix(Z, T) -> np.ndarray:
    """D(Z,T) = V^{-1} diag(Q(Z T_k; T)^{-1}) V evaluated numerically."""
    T = np.asarray(T, dtype=complex)
    n = len(T)
    V = np.vander(T, n, increasing=True)
    diag = np.array([1.0 / _q_factor(Z, T[k], T) for k in range(n)])
    return np.linalg.solve(V, diag[:, None] * V)


def p_matrix(Z, T) -> np.ndarray:
    T = np.asarray(T, dtype=complex)
    n = len(T)
    V = np.vander(T, n, increasing=True)
    diag = 1.0 / (1 - Z * T)
    return np.linalg.solve(V, diag[:, None] * V)


def p_m_matrix(m: int, T):
    """P_m(T) via  (-1)^{n-i} sum_k (-1)^k e_{n-i-k}(T) h_{m+j+k-n}(T);
    division free, generic scalars."""
    T = list(T)
    n = len(T)
    es = elementary_all(T)
    hs = complete_all(m + 2 * n, T)
    one = _one_like(T)

    def h(k):
        return hs[k] if k >= 0 else 0 * one

    out = []
    for i in range(1, n + 1):
        row = []
        for j in range(1, n + 1):
            s = 0 * one
            for k in range(0, n - i + 1):
                term = es[n - i - k] * h(m + j + k - n)
                s = s + term if k % 2 == 0 else s - term
            row.append(s if (n - i) % 2 == 0 else -s)
        out.append(row)
    return out


def p_m_numeric(m: int, T) -> np.ndarray:
    T = np.asarray(T, dtype=complex)
    n = len(T)
    es = np.array(elementary_all(list(T)), dtype=complex)
    hs = complete_numeric(m + 2 * n, T)
    out = np.zeros((n, n), dtype=complex)
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            s = 0j
            for k in range(0, n - i + 1):
                idx = m + j + k - n
                if idx >= 0:
                    s += (-1) ** k * es[n - i - k] * hs[idx]
            out[i - 1, j - 1] = (-1) ** (n - i) * s
    return out


def d_star_degree_bound(n: int) -> int:
    """Z-degree bound for D*: each entry is a sum of products of n(n-1)
    linear forms in Z."""
    return n * (n - 1)


def _poly_mul_trunc(a, b, deg):
    out = [0] * (deg + 1)
    for i, x in enumerate(a):
        if i > deg or not x:
            continue
        for j, y in enumerate(b):
            if i + j > deg:
                break
            if y:
                out[i + j] = out[i + j] + x * y
    return out


def d_star_series(T):
    """Coefficient list [A_0, ..., A_{n(n-1)}] (each an n x n matrix) of
    D*(Z,T), from  e_n^{n-1} prod_{a,b}(1 - Z T_a/T_b) * sum_m h_m(1/T) P_m(T) Z^m
    truncated at the degree bound.  Generic scalars; T_i must be invertible."""
    T = list(T)
    n = len(T)
    deg = d_star_degree_bound(n)
    one = _one_like(T)
    inv = [t.monomial_inverse() if isinstance(t, LaurentPoly) else (Fraction(1) / t if isinstance(t, (int, Fraction)) else 1 / t) for t in T]
    clear = [one]
    for a in range(n):
        for b in range(n):
            clear = _poly_mul_trunc(clear, [one, -(T[a] * inv[b])], deg)
    en = elementary(n, T)
    scale = en ** (n - 1) if n > 1 else one
    hinv = complete_all(deg, inv)
    coeffs = []
    for k in range(deg + 1):
        acc = [[0 * one for _ in range(n)] for _ in range(n)]
        for m in range(k + 1):
            c = clear[k - m] * hinv[m]
            if not c:
                continue
            Pm = p_m_matrix(m, T)
            for i in range(n):
                for j in range(n):
                    acc[i][j] = acc[i][j] + c * Pm[i][j]
        coeffs.append([[scale * v for v in row] for row in acc])
    return coeffs


@lru_cache(maxsize=None)
def d_star_symbolic(n: int):
    """D*(Z,T) as LaurentPoly entries over variables T1..Tn, Z, computed by
    clearing the Vandermonde denominators from the rational expression and
    dividing the resulting alternating numerator by D(T)."""
    names, gens = laurent_variables(n, extra=("Z",))
    T = gens[:n]
    Z = gens[n]
    one = LaurentPoly.const(names, 1)
    big = []
    for alpha in range(n):
        prod = one
        for a in range(n):
            if a == alpha:
                continue
            for b in range(n):
                prod = prod * (T[b] - Z * T[a])
        big.append(prod)
    dhat = []
    for alpha in range(n):
        rest = _hat(T, alpha)
        prod = one
        for i in range(len(rest)):
            for j in range(i + 1, len(rest)):
                prod = prod * (rest[j] - rest[i])
        dhat.append(prod)
    out = []
    for i in range(1, n + 1):
        row = []
        for j in range(1, n + 1):
            num = LaurentPoly(names)
            for alpha in range(n):
                sgn = (-1) ** (n - 1 - alpha) * (-1) ** (n - i)
                term = elementary(n - i, _hat(T, alpha)) * T[alpha] ** (j - 1) * big[alpha] * dhat[alpha]
                num = num + (term if sgn > 0 else -term)
            for a in range(n):
                for b in range(a + 1, n):
                    num = num.divide_linear(names[b], names[a])
            row.append(num)
        out.append(row)
    return names, out


def p_star_series(T):
    """Coefficients of P*(Z,T) = prod(1 - Z T_i) P(Z,T) up to degree n-1,
    plus the (should-vanish) next n coefficients for checking."""
    T = list(T)
    n = len(T)
    one = _one_like(T)
    lin = [one]
    for t in T:
        lin = _poly_mul_trunc(lin, [one, -t], n)
    coeffs = []
    for k in range(2 * n):
        acc = [[0 * one for _ in range(n)] for _ in range(n)]
        for m in range(k + 1):
            if k - m > n or not lin[k - m]:
                continue
            Pm = p_m_matrix(m, T)
            for i in range(n):
                for j in range(n):
                    acc[i][j] = acc[i][j] + lin[k - m] * Pm[i][j]
        coeffs.append(acc)
    return coeffs[:n], coeffs[n:]


def poly_matrix_eval(coeffs, Z) -> np.ndarray:
    n = len(coeffs[0])
    out = np.zeros((n, n), dtype=complex)
    zk = 1.0 + 0j
    for A in coeffs:
        out += zk * np.array([[complex(v) for v in row] for row in A], dtype=complex)
        zk *= Z
    return out


def d_star_numeric(Z, T) -> np.ndarray:
    """Numeric D*(Z,T); works for repeated entries of T."""
    T = [complex(t) for t in T]
    if abs(np.prod(T)) == 0:
        raise ValueError("e_n(T) must be nonzero")
    return poly_matrix_eval(d_star_series(T), Z)


def d_star(T, Z=None, method: str = "symbolic"):
    """D*(Z,T).  With ``method='symbolic'`` the generic polynomial is built
    once per n and specialised at T (and Z if given); ``'series'`` uses the
    division-free truncated expansion."""
    T = list(T)
    n = len(T)
    if any(not t for t in T):
        raise ValueError("e_n(T) must be nonzero")
    if method == "series":
        coeffs = d_star_series(T)
        if Z is None:
            return coeffs
        return poly_matrix_eval(coeffs, Z)
    names, M = d_star_symbolic(n)
    if Z is None:
        return [[_specialize(M[i][j], names, T) for j in range(n)] for i in range(n)]
    vals = dict(zip(names, list(T) + [Z]))
    if all(isinstance(v, (int, Fraction)) for v in vals.values()):
        return [[M[i][j].evaluate(vals) for j in range(n)] for i in range(n)]
    return np.array([[_eval_fast(M[i][j], names, list(T) + [Z]) for j in range(n)] for i in range(n)])


def _specialize(poly, names, T):
    """Substitute T, keep Z: returns list of Z-coefficients."""
    zc = poly.coefficients_in("Z")
    deg = max(zc) if zc else 0
    out = []
    for k in range(deg + 1):
        c = zc.get(k)
        out.append(c.evaluate(list(T) + [1]) if c is not None else 0)
    return out


_FAST_CACHE: dict = {}


def _eval_fast(poly, names, vals) -> complex:
    key = id(poly)
    if key not in _FAST_CACHE:
        exps = np.array(list(poly.terms.keys()), dtype=np.int64)
        cs = np.array([complex(c) for c in poly.terms.values()], dtype=complex)
        _FAST_CACHE[key] = (poly, exps, cs)
    _, exps, cs = _FAST_CACHE[key]
    if len(cs) == 0:
        return 0j
    v = np.asarray(vals, dtype=complex)
    return complex(np.sum(cs * np.prod(v[None, :] ** exps, axis=1)))


def in_convergence_set(z, x, tol: float = 1e-9) -> bool:
    x = np.asarray(x, dtype=complex)
    if abs(np.prod(x)) == 0:
        return False
    bound = min(1.0 / abs(xi * np.conj(xj)) for xi in x for xj in x)
    if not abs(z) < bound:
        return False
    inv = sorted(1 / x, key=lambda c: (round(c.real, 8), round(c.imag, 8)))
    bar = sorted(np.conj(x), key=lambda c: (round(c.real, 8), round(c.imag, 8)))
    return all(abs(a - b) <= tol for a, b in zip(inv, bar))


def power_series_check(z, x, M: int = 40):
    """Max entrywise error of  sum_{m<=M} h_m(conj x) P_m(x) z^m  against
    D(z,x) evaluated through D*; requires (z,x) in the convergence set."""
    if not in_convergence_set(z, x):
        raise ValueError("(z, x) is outside the convergence set")
    x = np.asarray(x, dtype=complex)
    n = len(x)
    hb = complete_numeric(M, np.conj(x))
    total = np.zeros((n, n), dtype=complex)
    zm = 1.0 + 0j
    for m in range(M + 1):
        total += hb[m] * p_m_numeric(m, x) * zm
        zm *= z
    dstar = d_star(list(x), z, method="symbolic")
    clear = np.prod(x) ** (n - 1) * np.prod([1 - z * a / b for a in x for b in x])
    ref = np.asarray(dstar) / clear
    return float(np.max(np.abs(total - ref))), total, ref


def gaussian_binomial(m: int, j: int, q: int) -> int:
    if j < 0 or j > m:
        return 0
    num = 1
    den = 1
    for i in range(j):
        num *= q ** (m - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def all_permutations(n):
    return list(itertools.permutations(range(n)))
