"""Exact matrices over Q with p-local structure.

Elements of Q_p are always rationals; every statement here involves finitely
many of them, so no truncated expansions are needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction

import numpy as np

from .exactnum import as_fraction, is_p_integral, unit_part, valuation, _check_prime


class ExactMatrix:
    """Immutable rational matrix."""

    __slots__ = ("rows",)

    def __init__(self, rows):
        rows = tuple(tuple(as_fraction(x) for x in r) for r in rows)
        if rows and any(len(r) != len(rows[0]) for r in rows):
            raise ValueError("ragged rows")
        self.rows = rows

    @classmethod
    def _wrap(cls, rows) -> "ExactMatrix":
        """Trusted constructor for rows of Fractions built internally."""
        m = object.__new__(cls)
        m.rows = tuple(tuple(r) for r in rows)
        return m

    # construction -----------------------------------------------------
    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, r: int, c: int | None = None) -> "ExactMatrix":
        return cls([[0] * (r if c is None else c) for _ in range(r)])

    @classmethod
    def diag(cls, entries) -> "ExactMatrix":
        entries = list(entries)
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def column(cls, v) -> "ExactMatrix":
        return cls([[x] for x in v])

    @classmethod
    def block(cls, blocks) -> "ExactMatrix":
        """Assemble from a 2D list of ExactMatrix blocks."""
        rows = []
        for brow in blocks:
            h = brow[0].nrows
            for i in range(h):
                rows.append(sum((b.rows[i] for b in brow), ()))
        return cls(rows)

    # shape/access -----------------------------------------------------
    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def row(self, i):
        return self.rows[i]

    def col(self, j):
        return tuple(r[j] for r in self.rows)

    def submatrix(self, rows, cols) -> "ExactMatrix":
        return ExactMatrix([[self.rows[i][j] for j in cols] for i in rows])

    def entries(self):
        for r in self.rows:
            yield from r

    def diagonal(self):
        return tuple(self.rows[i][i] for i in range(min(self.shape)))

    def tolist(self):
        return [list(r) for r in self.rows]

    def to_numpy(self) -> np.ndarray:
        return np.array([[float(x) for x in r] for r in self.rows], dtype=float)

    # arithmetic -------------------------------------------------------
    def __add__(self, other):
        return ExactMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other):
        return ExactMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __neg__(self):
        return ExactMatrix([[-a for a in r] for r in self.rows])

    def __mul__(self, c):
        c = as_fraction(c)
        return ExactMatrix([[a * c for a in r] for r in self.rows])

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self * (1 / as_fraction(c))

    def __matmul__(self, other):
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        cols = list(zip(*other.rows))
        zero = Fraction(0)
        return ExactMatrix._wrap([[sum((a * b for a, b in zip(r, c) if a and b), zero) for c in cols] for r in self.rows])

    def apply(self, v):
        return tuple(sum((a * as_fraction(b) for a, b in zip(r, v)), Fraction(0)) for r in self.rows)

    @property
    def T(self) -> "ExactMatrix":
        return ExactMatrix(list(zip(*self.rows)))

    def __eq__(self, other):
        return isinstance(other, ExactMatrix) and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        return "ExactMatrix(" + repr([[str(x) for x in r] for r in self.rows]) + ")"

    # elimination -------------------------------------------------------
    def _echelon(self):
        """(reduced rows, pivot columns, determinant sign*product)."""
        m = [list(r) for r in self.rows]
        nr, nc = self.shape
        piv = []
        det = Fraction(1)
        r = 0
        for c in range(nc):
            k = next((i for i in range(r, nr) if m[i][c]), None)
            if k is None:
                det = Fraction(0)
                continue
            if k != r:
                m[r], m[k] = m[k], m[r]
                det = -det
            pv = m[r][c]
            det *= pv
            m[r] = [x / pv for x in m[r]]
            for i in range(nr):
                if i != r and m[i][c]:
                    f = m[i][c]
                    m[i] = [a - f * b for a, b in zip(m[i], m[r])]
            piv.append(c)
            r += 1
            if r == nr:
                break
        if r < nr or len(piv) < nc:
            det = Fraction(0) if nr == nc else det
        return m, piv, det

    def rank(self) -> int:
        return len(self._echelon()[1])

    def det(self) -> Fraction:
        if self.nrows != self.ncols:
            raise ValueError("square matrix required")
        n = self.nrows
        if n == 0:
            return Fraction(1)
        m = self.rows
        if n == 1:
            return m[0][0]
        if n == 2:
            return m[0][0] * m[1][1] - m[0][1] * m[1][0]
        if n == 3:
            return (
                m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
            )
        _, piv, det = self._echelon()
        return det if len(piv) == self.nrows else Fraction(0)

    def inverse(self) -> "ExactMatrix":
        n = self.nrows
        if n != self.ncols:
            raise ValueError("square matrix required")
        aug = ExactMatrix([list(r) + [1 if i == j else 0 for j in range(n)] for i, r in enumerate(self.rows)])
        m, piv, _ = aug._echelon()
        if piv[:n] != list(range(n)):
            raise ZeroDivisionError("singular matrix")
        return ExactMatrix([r[n:] for r in m])

    def nullspace(self):
        """Basis (list of tuples) of {x : self x = 0}."""
        m, piv, _ = self._echelon()
        nc = self.ncols
        free = [c for c in range(nc) if c not in piv]
        basis = []
        for f in free:
            x = [Fraction(0)] * nc
            x[f] = Fraction(1)
            for r, c in enumerate(piv):
                x[c] = -m[r][f]
            basis.append(tuple(x))
        return basis

    def minor(self, rows, cols) -> Fraction:
        return self.submatrix(rows, cols).det()

    # predicates -------------------------------------------------------
    def is_upper_triangular(self) -> bool:
        return all(not self.rows[i][j] for i in range(self.nrows) for j in range(min(i, self.ncols)))

    def is_upper_unipotent(self) -> bool:
        return self.is_upper_triangular() and all(d == 1 for d in self.diagonal())

    def is_p_integral(self, p: int) -> bool:
        return all(is_p_integral(x, p) for x in self.entries())

    def min_valuation(self, p: int):
        return min(valuation(x, p) for x in self.entries())

    def in_GL_Zp(self, p: int) -> bool:
        return self.is_p_integral(p) and valuation(self.det(), p) == 0


def permutation_matrix(images) -> ExactMatrix:
    """Matrix (delta_{i, w(j)}) for w given by 1-based images w(1..n)."""
    return _permutation_matrix(tuple(images))


@lru_cache(maxsize=4096)
def _permutation_matrix(images) -> ExactMatrix:
    n = len(images)
    return ExactMatrix([[1 if images[j] == i + 1 else 0 for j in range(n)] for i in range(n)])


def as_matrix(g) -> ExactMatrix:
    return g if isinstance(g, ExactMatrix) else ExactMatrix(g)


# --------------------------------------------------------------------------
# Iwasawa over Q_p


@dataclass(frozen=True)
class IwasawaData:
    u: ExactMatrix
    t: ExactMatrix
    k: ExactMatrix
    exponents: tuple
    units: tuple

    def abs_t(self, p: int):
        return tuple(Fraction(p) ** (-a) for a in self.exponents)


def iwasawa_qp(g, p: int) -> IwasawaData:
    """g = u t k with k in GL_n(Z_p), by bottom-up column elimination
    (minimal valuation pivot, ties to the smallest column)."""
    _check_prime(p)
    g = as_matrix(g)
    n = g.nrows
    if g.det() == 0:
        raise ValueError("singular matrix")
    b = [list(r) for r in g.rows]
    E = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]

    def col_swap(a, c):
        for M in (b, E):
            for r in M:
                r[a], r[c] = r[c], r[a]

    def col_add(dst, src, f):
        for M in (b, E):
            for r in M:
                r[dst] -= f * r[src]

    for r in range(n - 1, -1, -1):
        cands = [c for c in range(r + 1) if b[r][c]]
        c = min(cands, key=lambda j: (valuation(b[r][j], p), j))
        if c != r:
            col_swap(c, r)
        for j in range(r):
            if b[r][j]:
                col_add(j, r, b[r][j] / b[r][r])
    B = ExactMatrix(b)
    Em = ExactMatrix(E)
    diag = B.diagonal()
    t = ExactMatrix.diag(diag)
    u = B @ ExactMatrix.diag([1 / d for d in diag])
    k = Em.inverse()
    exps = tuple(valuation(d, p) for d in diag)
    units = tuple(unit_part(d, p) for d in diag)
    return IwasawaData(u=u, t=t, k=k, exponents=exps, units=units)


# --------------------------------------------------------------------------
# explicit Iwasawa data of a lower unipotent [[1, 0], [xi^T, 1]]


@dataclass(frozen=True)
class LowerIwasawa:
    upsilon: ExactMatrix
    ell: tuple
    alpha: tuple
    t: Fraction
    kappa: ExactMatrix
    chain: tuple  # 1-based indices of the decreasing sequence (empty if integral)

    def upper(self) -> ExactMatrix:
        r = len(self.alpha)
        top = [list(self.upsilon.rows[i]) + [self.ell[i]] for i in range(r)]
        return ExactMatrix(top + [[0] * r + [1]])

    def torus(self) -> ExactMatrix:
        return ExactMatrix.diag(list(self.alpha) + [self.t])


def lower_unipotent(xi) -> ExactMatrix:
    r = len(xi)
    rows = [[1 if i == j else 0 for j in range(r)] + [0] for i in range(r)]
    rows.append([as_fraction(x) for x in xi] + [1])
    return ExactMatrix(rows)


def valuation_chain(xi, p: int):
    """Strictly decreasing 1-based indices: each is the largest index attaining
    the maximum of |xi_j|_p over the indices below the previous one, as long
    as that maximum exceeds 1."""
    chain = []
    top = len(xi) + 1
    while True:
        vals = [valuation(as_fraction(x), p) for x in xi[: top - 1]]
        if not vals:
            break
        vmin = min(vals)
        if not vmin < 0:
            break
        idx = max(j for j, v in enumerate(vals) if v == vmin) + 1
        chain.append(idx)
        top = idx
    return tuple(chain)


def explicit_lower_iwasawa(xi, p: int) -> LowerIwasawa:
    """[[1, 0], [xi^T, 1]] = [[Y, l], [0, 1]] diag(alpha, t) kappa with the
    closed-form data; kappa is checked to lie in GL(Z_p)."""
    _check_prime(p)
    z = [as_fraction(x) for x in xi]
    r = len(z)
    nbar = lower_unipotent(z)
    chain = valuation_chain(z, p)
    if not chain:
        return LowerIwasawa(ExactMatrix.identity(r), (Fraction(0),) * r, (Fraction(1),) * r, Fraction(1), nbar, ())

    def zz(i):  # 1-based, with the sentinel z_{r+1} = -1
        return Fraction(-1) if i == r + 1 else z[i - 1]

    alpha = [Fraction(1)] * r
    a = len(chain) - 1
    alpha[chain[a] - 1] = -1 / zz(chain[a])
    for nu in range(1, a + 1):
        alpha[chain[nu - 1] - 1] = -zz(chain[nu]) / zz(chain[nu - 1])
    t = zz(chain[0])
    up = [[Fraction(int(i == j)) for j in range(r + 1)] for i in range(r + 1)]
    for nu, i in enumerate(chain):
        prev = chain[nu - 1] if nu > 0 else r + 1
        for c in range(i + 1, prev + 1):
            up[i - 1][c - 1] = -zz(c) / zz(i)
    U = ExactMatrix(up)
    D = ExactMatrix.diag(alpha + [t])
    kappa = D.inverse() @ U.inverse() @ nbar
    if not kappa.in_GL_Zp(p):
        raise ArithmeticError("kappa is not in GL(Z_p)")
    upsilon = U.submatrix(range(r), range(r))
    ell = U.col(r)[:r]
    return LowerIwasawa(upsilon, tuple(ell), tuple(alpha), t, kappa, chain)


@dataclass(frozen=True)
class ArchLowerIwasawa:
    upsilon: np.ndarray
    ell: np.ndarray
    alpha: np.ndarray
    t: float
    kappa: np.ndarray


def arch_lower_iwasawa(xi) -> ArchLowerIwasawa:
    """Real case: closed forms for t, l, alpha; Y and kappa from an RQ
    factorisation normalised to a positive diagonal."""
    from scipy.linalg import rq

    z = np.asarray(xi, dtype=float)
    r = len(z)
    s2 = float(z @ z)
    t = math.sqrt(1 + s2)
    ell = z / (1 + s2)
    cums = np.concatenate([[0.0], np.cumsum(z**2)])
    alpha = np.sqrt((1 + cums[:-1]) / (1 + cums[1:]))
    nbar = np.eye(r + 1)
    nbar[r, :r] = z
    R, Qm = rq(nbar)
    sgn = np.sign(np.diag(R))
    sgn[sgn == 0] = 1
    R = R * sgn[None, :]
    Qm = sgn[:, None] * Qm
    d = np.diag(R)
    Un = R / d[None, :]
    upsilon = Un[:r, :r]
    return ArchLowerIwasawa(upsilon=upsilon, ell=ell, alpha=alpha, t=t, kappa=Qm)


def arch_gram_residual(data: ArchLowerIwasawa, xi) -> float:
    z = np.asarray(xi, dtype=float)
    ya = data.upsilon * data.alpha[None, :]
    lhs = ya @ ya.T
    rhs = np.eye(len(z)) - np.outer(z, z) / (1 + z @ z)
    return float(np.max(np.abs(lhs - rhs))) if len(z) else 0.0


# --------------------------------------------------------------------------
# Smith form at p


def smith_at_p(A, p: int) -> tuple:
    """Elementary divisor exponents of a p-integral nonsingular matrix."""
    _check_prime(p)
    A = as_matrix(A)
    if not A.is_p_integral(p):
        raise ValueError("matrix must be p-integral")
    m = [list(r) for r in A.rows]
    n = len(m)
    out = []
    for s in range(n):
        best = None
        for i in range(s, n):
            for j in range(s, n):
                if m[i][j]:
                    v = valuation(m[i][j], p)
                    if best is None or v < best[0]:
                        best = (v, i, j)
        if best is None:
            raise ValueError("singular matrix")
        v, i, j = best
        m[s], m[i] = m[i], m[s]
        for r in m:
            r[s], r[j] = r[j], r[s]
        pv = m[s][s]
        for i in range(s + 1, n):
            if m[i][s]:
                f = m[i][s] / pv
                m[i] = [a - f * b for a, b in zip(m[i], m[s])]
        for j in range(s + 1, n):
            if m[s][j]:
                f = m[s][j] / pv
                for r in m:
                    r[j] -= f * r[s]
        out.append(v)
    return tuple(sorted(out))


# --------------------------------------------------------------------------
# level structures


def _level_exponent(N: int, p: int) -> int:
    if N < 1:
        raise ValueError("level must be a positive integer")
    return valuation(N, p)


def in_ZK1(N: int, g, p: int):
    """(True, z) with z^{-1} g in K_1(N Z_p), or (False, None)."""
    _check_prime(p)
    g = as_matrix(g)
    n = g.nrows
    det = g.det()
    if det == 0:
        raise ValueError("singular matrix")
    e = _level_exponent(N, p)
    if e == 0:
        v = g.min_valuation(p)
        if valuation(det, p) != n * v:
            return False, None
        return True, Fraction(p) ** v
    z = g[n - 1, n - 1]
    if z == 0:
        return False, None
    k = g / z
    if not k.in_GL_Zp(p):
        return False, None
    if any(valuation(k[n - 1, i], p) < e for i in range(n - 1)):
        return False, None
    return True, z


def in_ZGK1(N: int, X, p: int):
    """Whether X lies in iota(GL_{n-1}(Q_p)) Z(Q_p) K_1(N Z_p).

    Left multiplication by iota(h) mixes the top rows arbitrarily, so the
    test reduces to the last row r: for a scalar z fixed by the level, r/z
    must be integral with the right congruences, and r/z must complete the
    saturated lattice (row space of the top block) to Z_p^n."""
    X = as_matrix(X)
    n = X.nrows
    det = X.det()
    if det == 0:
        raise ValueError("singular matrix")
    e = _level_exponent(N, p)
    r = X.row(n - 1)
    if e > 0:
        z = r[n - 1]
        if z == 0:
            return False
    else:
        z = Fraction(p) ** min(valuation(x, p) for x in r)
    rz = [x / z for x in r]
    if not all(is_p_integral(x, p) for x in rz):
        return False
    if e > 0 and any(x and valuation(x, p) < e for x in rz[:-1]):
        return False
    top = X.submatrix(range(n - 1), range(n))
    cof_val = min(
        valuation(top.minor(range(n - 1), [c for c in range(n) if c != j]), p) for j in range(n)
    )
    return valuation(det / z, p) == cof_val


def support_indicator(Q, y, w, N: int, p: int, Z, xi, xip) -> bool:
    """Exact test of: exists h with iota(h)^{-1} n(y) w [w0 Z w0^{-1}; ...]_w
    in Z(Q_p) K_1(N Z_p)."""
    from .weylcoset import orbit_matrix

    X = orbit_matrix(Q, y, w, Z, xi, xip)
    return in_ZGK1(N, X, p)


def support_necessary_conditions(Q, y, w, N: int, p: int, Z, xi, xip) -> dict:
    """The corollary-level necessary conditions (Q a proper subset): the
    last-row vector scaled by 1/t is primitive in N Z_p^{n-1} + Z_p, where t
    comes from the explicit Iwasawa data of the part of xi' supported on
    sp(y)."""
    from .weylcoset import Permutation, w0_of, support

    w = w if isinstance(w, Permutation) else Permutation(w)
    n = w.n
    m = w.inverse()(n)
    w0 = w0_of(w)
    sp = support(y)
    xip = [as_fraction(x) for x in xip]
    plus = [x if w0(m + k) in sp else Fraction(0) for k, x in enumerate(xip)]
    data = explicit_lower_iwasawa(plus, p)
    t = data.t
    vec = [Fraction(0)] * (m - 1) + [Fraction(1)] + list(xip)
    scaled = [x / t for x in vec]
    e = _level_exponent(N, p)
    integral = all(is_p_integral(x, p) for x in scaled)
    primitive = integral and min(valuation(x, p) for x in scaled) == 0
    congruence = all(not x or valuation(x, p) >= e for x in scaled[:-1])
    return {"t": t, "integral": integral, "primitive": primitive, "congruence": congruence,
            "holds": integral and primitive and congruence}


# --------------------------------------------------------------------------
# seeded fuzz corpus for the vanishing predicates


@dataclass(frozen=True)
class VanishingScan:
    n: int
    p: int
    samples: int
    forced: int  # samples where p | N and (y = 0 or y_{q'} not in N Z_p)
    forced_true: int  # violations: the indicator fired on a forced sample
    control_true: int  # indicator hits on the unforced samples

    @property
    def ok(self) -> bool:
        return self.forced_true == 0


def vanishing_requirement(y, N: int, p: int) -> bool:
    """p | N and (y = 0 or y_{q'} not in N Z_p), q' the smallest index of sp(y)."""
    if N % p:
        return False
    nz = [as_fraction(v) for v in y if v]
    return not nz or valuation(nz[0], p) < valuation(N, p)


def vanishing_fuzz(n: int, p: int, samples: int, seed: int = 0, forced_share: float = 0.9) -> VanishingScan:
    """Random admissible (Q, y, w) with proper Q, levels N in {p, p^2, p q},
    and coordinates with denominators up to p^3.  About ``forced_share`` of
    the samples satisfy the vanishing hypothesis; the rest are a control."""
    import random

    from .weylcoset import admissible_triples, coset_parametrization

    _check_prime(p)
    rng = random.Random(seed)
    other = 3 if p == 2 else 2
    levels = (p, p * p, p * other)
    values = (1, p, Fraction(1, p), p * p, other * p, Fraction(other, p))
    triples = [t for t in admissible_triples(n, values=values) if len(t[0]) < n - 1]
    params = {t: coset_parametrization(*t) for t in triples}
    pools = {}
    for N in levels:
        forced = [t for t in triples if vanishing_requirement(t[1], N, p)]
        free = [t for t in triples if not vanishing_requirement(t[1], N, p)]
        pools[N] = (forced, free)
    dens = (1, 1, p, p * p, p**3, other * p)

    def coord():
        return Fraction(rng.randint(-30, 30), rng.choice(dens))

    forced_n = forced_true = control_true = 0
    for _ in range(samples):
        N = rng.choice(levels)
        forced_pool, free_pool = pools[N]
        pool = forced_pool if (rng.random() < forced_share or not free_pool) else free_pool
        Q, y, w = rng.choice(pool)
        cp = params[(Q, y, w)]
        Z = cp.V_element([coord() for _ in cp.V_roots])
        xi = [coord() for _ in range(cp.xi_dim)]
        xip = [coord() for _ in range(cp.xip_dim)]
        hit = support_indicator(Q, y, w, N, p, Z, xi, xip)
        if vanishing_requirement(y, N, p):
            forced_n += 1
            forced_true += hit
        else:
            control_true += hit
    return VanishingScan(n, p, samples, forced_n, forced_true, control_true)
