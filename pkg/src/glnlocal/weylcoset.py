"""Weyl group and (Z iota(B0), U) double cosets in GL_n(Q).

Indices are 1-based throughout, matching the usual matrix conventions:
I0 = {1..n-1}, a permutation w acts by the matrix (delta_{i, w(j)}).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .exactnum import as_fraction
from .padiclinalg import ExactMatrix, as_matrix, permutation_matrix


class Permutation:
    __slots__ = ("images",)

    def __init__(self, images):
        images = tuple(int(x) for x in images)
        if sorted(images) != list(range(1, len(images) + 1)):
            raise ValueError(f"not a permutation: {images}")
        self.images = images

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(range(1, n + 1))

    @classmethod
    def longest(cls, n: int) -> "Permutation":
        return cls(range(n, 0, -1))

    @classmethod
    def longest_levi(cls, n: int) -> "Permutation":
        """Longest element of S_{n-1} inside S_n (fixes n)."""
        return cls(list(range(n - 1, 0, -1)) + [n])

    @classmethod
    def all(cls, n: int):
        return [cls(p) for p in itertools.permutations(range(1, n + 1))]

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i - 1]

    def __mul__(self, other: "Permutation") -> "Permutation":
        return Permutation(self(other(i)) for i in range(1, self.n + 1))

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for i, wi in enumerate(self.images, start=1):
            inv[wi - 1] = i
        return Permutation(inv)

    def matrix(self) -> ExactMatrix:
        return permutation_matrix(self.images)

    def embed(self, n: int) -> "Permutation":
        return Permutation(list(self.images) + list(range(self.n + 1, n + 1)))

    def __eq__(self, other):
        return isinstance(other, Permutation) and self.images == other.images

    def __hash__(self):
        return hash(self.images)

    def __repr__(self):
        return f"Permutation{self.images}"


def _perm(w) -> Permutation:
    return w if isinstance(w, Permutation) else Permutation(w)


def support(y) -> frozenset:
    return frozenset(i + 1 for i, x in enumerate(y) if x)


def I_w0(w) -> frozenset:
    w = _perm(w)
    winv = w.inverse()
    return frozenset(i for i in range(1, w.n) if winv(i) > winv(w.n))


def in_Y(w, y) -> bool:
    w = _perm(w)
    sp = support(y)
    if not sp <= I_w0(w):
        return False
    winv = w.inverse()
    s = sorted(sp)
    return all(winv(h) > winv(k) for h, k in zip(s, s[1:]))


def in_YQ(Q, y, n: int) -> bool:
    Q = frozenset(Q)
    sp = support(y)
    allowed = frozenset(range(1, n)) - Q
    if Q:
        allowed = frozenset(i for i in allowed if i < min(Q))
    return sp <= allowed


def fN(w) -> tuple:
    w = _perm(w)
    m = w.inverse()(w.n)
    return tuple(i for i in range(1, w.n) if i > m and w(i) < w(i + 1))


def Q_of(w) -> frozenset:
    w = _perm(w)
    m = w.inverse()(w.n)
    return frozenset(w(i) for i in range(1, m))


def w0_of(w) -> Permutation:
    w = _perm(w)
    m = w.inverse()(w.n)
    return Permutation([w(j) if j < m else w(j + 1) for j in range(1, w.n)])


def in_SnQy(Q, y, w) -> bool:
    """Conditions (a)-(d) checked directly."""
    w = _perm(w)
    n = w.n
    Q = frozenset(Q)
    m = len(Q) + 1
    sp = support(y)
    if frozenset(w(i) for i in range(1, m)) != Q or w(m) != n:
        return False
    if any(w(i) <= w(i + 1) for i in range(1, m - 1)):
        return False
    winv = w.inverse()
    s = sorted(sp)
    if any(winv(h) <= winv(k) for h, k in zip(s, s[1:])):
        return False
    for j in fN(w):
        if w(j) in sp or w(j + 1) not in sp:
            return False
        if any(w(j) <= q < w(j + 1) for q in sp):
            return False
    return True


def enumerate_SnQy(Q, y, n: int | None = None) -> list:
    """All w in S_n(Q, y), built position by position with pruning."""
    if n is None:
        n = len(y) + 1
    Q = frozenset(Q)
    sp = support(y)
    Qp = frozenset(range(1, n)) - Q
    if not sp <= Qp:
        raise ValueError("support of y must lie in the complement of Q")
    head = sorted(Q, reverse=True) + [n]
    m = len(head)
    out = []

    def extend(prefix, remaining, last_sp):
        # last_sp: value of the most recent support element placed (for (c))
        if not remaining:
            out.append(Permutation(prefix))
            return
        pos = len(prefix) + 1
        for v in sorted(remaining):
            if v in sp and last_sp is not None and v > last_sp:
                continue  # w^{-1} must decrease on sp(y)
            prev = prefix[-1]
            if pos - 1 > m and prev < v:
                # pos-1 lies in N(w): condition (d)
                if prev in sp or v not in sp or any(prev <= q < v for q in sp):
                    continue
            extend(prefix + [v], remaining - {v}, v if v in sp else last_sp)

    extend(head, Qp, None)
    return out


def brute_force_SnQy(Q, y, n: int) -> list:
    return [w for w in Permutation.all(n) if in_SnQy(Q, y, w)]


# --------------------------------------------------------------------------
# stabilisers and a(gamma)


@dataclass(frozen=True)
class StabilizerDescription:
    coords: tuple  # free coordinates (i, j) of U0, 1-based, i < j
    constraints: tuple  # rows over coords
    dimension: int
    character: tuple  # the linear form psi_U(gamma^{-1} iota(u) gamma) in coords


def u0_coords(n: int) -> tuple:
    return tuple((i, j) for i in range(1, n) for j in range(i + 1, n))


def stabilizer(y, w) -> StabilizerDescription:
    """U_[gamma] for gamma = n(y) w as a linear space in the coordinates of
    U0: the zero conditions on inverted pairs and the linear relations tying
    coordinates to y."""
    w = _perm(w)
    n = w.n
    y = [as_fraction(v) for v in y]
    winv = w.inverse()
    coords = u0_coords(n)
    index = {c: k for k, c in enumerate(coords)}
    sp = support(y)
    rows = []
    for (i, j) in coords:
        if winv(i) > winv(j):
            r = [Fraction(0)] * len(coords)
            r[index[(i, j)]] = Fraction(1)
            rows.append(tuple(r))
    for i in sorted(I_w0(w) - sp):
        r = [Fraction(0)] * len(coords)
        for j in sp:
            if j > i and winv(i) < winv(j):
                r[index[(i, j)]] += y[j - 1]
        if any(r):
            rows.append(tuple(r))
    rank = ExactMatrix(rows).rank() if rows else 0
    return StabilizerDescription(
        coords=coords,
        constraints=tuple(rows),
        dimension=len(coords) - rank,
        character=_character_form(y, w, coords),
    )


def _character_form(y, w, coords):
    """Linear form u -> sum_i v_{w(i), w(i+1)} with v = [[u, uy - y], [0, 1]]."""
    n = w.n
    index = {c: k for k, c in enumerate(coords)}
    form = [Fraction(0)] * len(coords)
    for i in range(1, n):
        a, b = w(i), w(i + 1)
        if a < n and b < n:
            if a < b:
                form[index[(a, b)]] += 1
        elif b == n:
            for j in range(a + 1, n):
                if y[j - 1]:
                    form[index[(a, j)]] += y[j - 1]
    return tuple(form)


def a_gamma(y, w, Q=None) -> int:
    """1 iff y in Y_Q and w in S_n(Q, y) for Q = w([1, w^{-1}(n) - 1])."""
    w = _perm(w)
    Qw = Q_of(w)
    if Q is not None and frozenset(Q) != Qw:
        return 0
    return int(in_YQ(Qw, y, w.n) and in_SnQy(Qw, y, w))


def character_trivial_on(desc: StabilizerDescription) -> bool:
    """Whether the character form vanishes on the solution space."""
    if not any(desc.character):
        return True
    if not desc.constraints:
        return False
    base = ExactMatrix(desc.constraints).rank()
    return ExactMatrix(list(desc.constraints) + [desc.character]).rank() == base


# --------------------------------------------------------------------------
# classification


def n_matrix(y) -> ExactMatrix:
    n = len(y) + 1
    rows = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    for i, v in enumerate(y):
        rows[i][n - 1] = v
    return ExactMatrix(rows)


def iota(h) -> ExactMatrix:
    h = as_matrix(h)
    k = h.nrows
    return ExactMatrix([list(r) + [0] for r in h.rows] + [[0] * k + [1]])


def factor_unipotent(u, R) -> tuple:
    """u = x y with x supported on the pairs R (plus the diagonal) and y on
    the complementary pairs; solved diagonal by diagonal."""
    u = as_matrix(u)
    n = u.nrows
    R = frozenset(R)
    x = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    yv = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for d in range(1, n):
        for i in range(n - d):
            j = i + d
            val = u[i, j] - sum((x[i][k] * yv[k][j] for k in range(i + 1, j)), Fraction(0))
            if (i + 1, j + 1) in R:
                x[i][j] = val
            else:
                yv[i][j] = val
    return ExactMatrix(x), ExactMatrix(yv)


def bruhat(g) -> tuple:
    """g = b w u with b upper triangular, u upper unipotent."""
    g = as_matrix(g)
    n = g.nrows
    if g.det() == 0:
        raise ValueError("singular matrix")
    M = [list(r) for r in g.rows]
    Rinv = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]  # row ops applied: R M
    C = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]  # col ops: M C
    images = [0] * n
    for r in range(n - 1, -1, -1):
        c = next(j for j in range(n) if M[r][j])
        images[c] = r + 1
        for j in range(c + 1, n):
            if M[r][j]:
                f = M[r][j] / M[r][c]
                for row in M:
                    row[j] -= f * row[c]
                for row in C:
                    row[j] -= f * row[c]
        for i in range(r):
            if M[i][c]:
                f = M[i][c] / M[r][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
                Rinv[i] = [a - f * b for a, b in zip(Rinv[i], Rinv[r])]
    w = Permutation(images)
    D = ExactMatrix(M) @ w.matrix().T  # diagonal
    b = ExactMatrix(Rinv).inverse() @ D
    u = ExactMatrix(C).inverse()
    return b, w, u


@dataclass(frozen=True)
class Classification:
    y: tuple
    w: Permutation
    z: Fraction
    b: ExactMatrix  # upper triangular in GL_{n-1}
    u: ExactMatrix  # upper unipotent in GL_n

    def reconstruct(self) -> ExactMatrix:
        n = self.w.n
        return (
            ExactMatrix.identity(n) * self.z
            @ iota(self.b)
            @ n_matrix(self.y)
            @ self.w.matrix()
            @ self.u
        )


def _b_correction(y, w):
    """b in U0 with iota(b) in U_w such that b y lies in Y(w)."""
    n = w.n
    winv = w.inverse()
    sp = support(y)
    Iw = I_w0(w)
    b = [[Fraction(int(i == j)) for j in range(n - 1)] for i in range(n - 1)]
    for i in range(1, n):
        if i not in Iw:
            continue
        js = [j for j in sorted(sp) if j > i and winv(i) < winv(j)]
        if js:
            j = js[0]
            b[i - 1][j - 1] = -y[i - 1] / y[j - 1]
    return ExactMatrix(b)


def classify(g) -> Classification:
    """(y, w) with y in Y(w) and g in Z iota(B0) n(y) w U, with witnesses."""
    g = as_matrix(g)
    n = g.nrows
    b1, w, u = bruhat(g)
    t = b1.diagonal()
    unip = ExactMatrix.diag([1 / x for x in t]) @ b1
    winv = w.inverse()
    inversions = {(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1) if winv(i) > winv(j)}
    u1, u2 = factor_unipotent(unip, inversions)
    # u2 in U_w, so u2 w = w (w^{-1} u2 w) with the conjugate in U
    wm = w.matrix()
    u = wm.T @ u2 @ wm @ u
    v = u1.submatrix(range(n - 1), range(n - 1))
    x = u1.col(n - 1)[: n - 1]
    y0 = v.inverse().apply(x)
    z = t[-1]
    b = ExactMatrix.diag([ti / z for ti in t[:-1]]) @ v
    if not in_Y(w, y0):
        c = _b_correction(y0, w)
        y1 = c.apply(y0)
        # n(y0) = iota(c)^{-1} n(c y0) iota(c), and iota(c) w = w (w^{-1} iota(c) w)
        b = b @ c.inverse()
        u = wm.T @ iota(c) @ wm @ u
        y0 = y1
    if not in_Y(w, y0):
        raise ArithmeticError("failed to reach Y(w)")
    return Classification(tuple(y0), w, z, b, u)


# --------------------------------------------------------------------------
# orbit elements [u; x, x']_w


@dataclass(frozen=True)
class OrbitElement:
    w: Permutation
    u: ExactMatrix  # (n-1) x (n-1), in w0 U0 w0^{-1}
    x: tuple
    xp: tuple

    def matrix(self) -> ExactMatrix:
        n = self.w.n
        top = [list(self.u.rows[i]) + [self.x[i]] for i in range(n - 1)]
        inner = ExactMatrix(top + [list(self.xp) + [1]])
        wm = self.w.matrix()
        return wm.T @ inner @ wm

    def __mul__(self, other: "OrbitElement") -> "OrbitElement":
        return orbit_product(self, other)

    def inverse(self) -> "OrbitElement":
        outer = ExactMatrix([[a * b for b in self.xp] for a in self.x])
        u2 = (self.u - outer).inverse()
        x2 = tuple(-v for v in self.u.inverse().apply(self.x))
        xp2 = tuple(-v for v in u2.T.apply(self.xp))
        return OrbitElement(self.w, u2, x2, xp2)


def orbit_product(a: OrbitElement, b: OrbitElement) -> OrbitElement:
    if a.w != b.w:
        raise ValueError("different Weyl elements")
    outer = ExactMatrix([[s * t for t in b.xp] for s in a.x])
    u = a.u @ b.u + outer
    x = tuple(s + t for s, t in zip(a.x, a.u.apply(b.x)))
    xp = tuple(s + t for s, t in zip(b.xp, b.u.T.apply(a.xp)))
    return OrbitElement(a.w, u, x, xp)


def orbit_identity(w) -> OrbitElement:
    w = _perm(w)
    n = w.n
    return OrbitElement(w, ExactMatrix.identity(n - 1), (Fraction(0),) * (n - 1), (Fraction(0),) * (n - 1))


# --------------------------------------------------------------------------
# coset parametrisation


@dataclass(frozen=True)
class CosetParametrization:
    Q: frozenset
    y: tuple
    w: Permutation
    w0: Permutation
    m: int
    fN: tuple
    J: tuple  # intervals J_nu(w)
    J_star: tuple  # sets J_nu^*(y, w)
    V0_roots: tuple  # (i-1, j_nu) root subgroups of U0
    lower_roots: tuple  # pairs a < b with w0(a) > w0(b)
    xi_dim: int
    xip_dim: int

    @property
    def V_roots(self) -> tuple:
        return self.V0_roots + self.lower_roots

    @property
    def dimension(self) -> int:
        return len(self.V_roots) + self.xi_dim + self.xip_dim

    def V0_commute(self) -> bool:
        rs = self.V0_roots
        return all(b != c and d != a for (a, b) in rs for (c, d) in rs)

    def V_element(self, values) -> ExactMatrix:
        """Z = (product of V0 root elements) (lower part), coordinates in
        the order of V_roots."""
        n = self.w.n
        values = list(values)
        k0 = len(self.V0_roots)
        Z0 = ExactMatrix.identity(n - 1)
        for (i, j), v in zip(self.V0_roots, values[:k0]):
            E = [[Fraction(int(a == b)) for b in range(n - 1)] for a in range(n - 1)]
            E[i - 1][j - 1] = as_fraction(v)
            Z0 = Z0 @ ExactMatrix(E)
        Z1 = [[Fraction(int(a == b)) for b in range(n - 1)] for a in range(n - 1)]
        for (i, j), v in zip(self.lower_roots, values[k0:]):
            Z1[i - 1][j - 1] = as_fraction(v)
        return Z0 @ ExactMatrix(Z1)

    def representative(self, Z, xi, xip) -> OrbitElement:
        return orbit_representative(self.w, Z, xi, xip)


def orbit_representative(w, Z, xi, xip) -> OrbitElement:
    """[w0 Z w0^{-1}; w0 [xi; 0], w0 [0; xi']]_w."""
    w = _perm(w)
    n = w.n
    m = w.inverse()(n)
    w0inv = w0_of(w).inverse()
    Z = as_matrix(Z)
    xi = [as_fraction(v) for v in xi]
    xip = [as_fraction(v) for v in xip]
    if len(xi) != m - 1 or len(xip) != n - m:
        raise ValueError("coordinate vectors have the wrong length")
    # permutation matrices act by reindexing: (W0 v)_i = v_{w0^{-1}(i)}
    src = [w0inv(i) - 1 for i in range(1, n)]
    u = ExactMatrix._wrap([[Z.rows[a][b] for b in src] for a in src])
    v = xi + [Fraction(0)] * (n - m)
    vp = [Fraction(0)] * (m - 1) + xip
    x = tuple(v[a] for a in src)
    xp = tuple(vp[a] for a in src)
    return OrbitElement(w, u, x, xp)


def orbit_matrix(Q, y, w, Z, xi, xip) -> ExactMatrix:
    """n(y) w [w0 Z w0^{-1}; w0 [xi; 0], w0 [0; xi']]_w."""
    w = _perm(w)
    if Q is not None and frozenset(Q) != Q_of(w):
        raise ValueError("Q does not match w")
    rep = orbit_representative(w, Z, xi, xip)
    n = w.n
    last = list(rep.xp) + [Fraction(1)]
    inner = [list(rep.u.rows[i]) + [rep.x[i]] for i in range(n - 1)] + [last]
    # w times rep.matrix() cancels its leading w^{-1}; n(y) adds y_i times the last row
    for i, yi in enumerate(y):
        yi = as_fraction(yi)
        if yi:
            inner[i] = [a + yi * b for a, b in zip(inner[i], last)]
    cols = [w(j) - 1 for j in range(1, n + 1)]
    return ExactMatrix._wrap([[r[c] for c in cols] for r in inner])


def coset_parametrization(Q, y, w) -> CosetParametrization:
    w = _perm(w)
    n = w.n
    Q = frozenset(Q)
    if not (in_YQ(Q, y, n) and in_SnQy(Q, y, w)):
        raise ValueError("(Q, y, w) is not admissible")
    m = w.inverse()(n)
    w0 = w0_of(w)
    sp = support(y)
    winv = w.inverse()
    js = fN(w)
    J, Jstar, roots = [], [], []
    prev = m
    for j in js:
        interval = tuple(range(prev + 1, j + 1))
        star = tuple(i for i in interval if w(i) not in sp and w(i) < w(j + 1))
        J.append(interval)
        Jstar.append(star)
        roots.extend((i - 1, j) for i in star)
        prev = j
    lower = tuple((a, b) for a in range(1, n) for b in range(a + 1, n) if w0(a) > w0(b))
    return CosetParametrization(
        Q=Q, y=tuple(as_fraction(v) for v in y), w=w, w0=w0, m=m, fN=js,
        J=tuple(J), J_star=tuple(Jstar), V0_roots=tuple(roots), lower_roots=lower,
        xi_dim=m - 1, xip_dim=n - m,
    )


def admissible_triples(n: int, values=(1,)):
    """All (Q, y, w) with y in Y_Q (nonzero entries drawn from ``values``
    on every support pattern) and w in S_n(Q, y)."""
    I0 = range(1, n)
    out = []
    for k in range(n):
        for Q in itertools.combinations(I0, k):
            Q = frozenset(Q)
            allowed = [i for i in I0 if i not in Q and (not Q or i < min(Q))]
            for r in range(len(allowed) + 1):
                for sp in itertools.combinations(allowed, r):
                    for vals in itertools.product(values, repeat=r):
                        y = [Fraction(0)] * (n - 1)
                        for i, v in zip(sp, vals):
                            y[i - 1] = Fraction(v)
                        for w in enumerate_SnQy(Q, y, n):
                            out.append((Q, tuple(y), w))
    return out
