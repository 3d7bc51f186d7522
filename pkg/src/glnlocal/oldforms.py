"""Old forms of level K_1(p) in an unramified generic representation of GL(n).

The space of K_1(p)-fixed Whittaker functions is spanned by

    W^(j)(g) = p^{-j(n-1-j)/2} p^{-j/2} sum_{K b in K\\X_j} W0(g iota(b^{-1})),

where X_j is the Hecke double coset of diag(p 1_j, 1_{n-1-j}) in GL(n-1).
This module builds those functions, their Gram matrix and zeta values, and
the local Whittaker period of the old-form space by three routes.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources

import numpy as np

from .exactnum import HalfPowerLaurent, _check_prime, p_fractional_part, psi_p, to_complex
from .padiclinalg import ExactMatrix, iwasawa_qp, smith_at_p
from .symfun import (
    LaurentPoly,
    complete_matrix,
    d_star,
    elementary,
    d_star_symbolic,
    gaussian_binomial,
    laurent_variables,
    schur_numeric_batch,
)
from .weylcoset import iota
from .whittaker import (
    SatakeParam,
    cs_value,
    delta_B_half,
    delta_B_half_numeric,
    local_L,
    rs_L,
    whittaker_at,
    zeta_p,
    zeta_truncated,
)

GRAM_CONDITION_LIMIT = 1e8


# ---------------------------------------------------------------------------
# Hecke cosets


@dataclass(frozen=True)
class HeckeCosetSet:
    m: int
    j: int
    p: int
    representatives: tuple

    def __len__(self):
        return len(self.representatives)

    def __iter__(self):
        return iter(self.representatives)

    def right_representatives(self) -> tuple:
        """Representatives of K\\X_j (transposes of the left ones)."""
        return tuple(b.T for b in self.representatives)


@lru_cache(maxsize=None)
def hecke_cosets(m: int, j: int, p: int) -> HeckeCosetSet:
    """Left coset representatives b K of K diag(p 1_j, 1_{m-j}) K in GL_m(Q_p).

    Hermite normal forms: upper triangular, diagonal in {1, p}, entries above
    the diagonal reduced modulo the diagonal entry of their row, kept when
    the Smith exponents are j ones and m - j zeros.
    """
    _check_prime(p)
    if not 0 <= j <= m:
        raise ValueError("need 0 <= j <= m")
    want = [0] * (m - j) + [1] * j
    slots = [(i, k) for i in range(m) for k in range(i + 1, m)]
    reps = []
    for where in itertools.combinations(range(m), j):
        diag = [p if i in where else 1 for i in range(m)]
        for vals in itertools.product(*[range(diag[i]) for i, _ in slots]):
            rows = [[Fraction(0)] * m for _ in range(m)]
            for i in range(m):
                rows[i][i] = Fraction(diag[i])
            for (i, k), v in zip(slots, vals):
                rows[i][k] = Fraction(v)
            b = ExactMatrix(rows)
            if sorted(smith_at_p(b, p)) == want:
                reps.append(b)
    if len(reps) != gaussian_binomial(m, j, p):
        raise AssertionError("coset enumeration does not match the Gaussian binomial")
    return HeckeCosetSet(m, j, p, tuple(reps))


def hnf_left_canonical(b: ExactMatrix, p: int) -> ExactMatrix:
    """Canonical representative of the left coset b GL_m(Z_p).

    Column reduction of an integral matrix to upper triangular form with
    diagonal entries powers of p and entries above the diagonal reduced
    modulo the diagonal entry of their row (p-adically, so the reduced
    entry is d times the p-adic fractional part of entry / d).
    """
    data = iwasawa_qp(b, p)
    m = b.nrows
    # b K = u t K; normalise t to powers of p and reduce entries of u t
    ut = data.u @ ExactMatrix.diag([Fraction(p) ** e for e in data.exponents])
    rows = [list(r) for r in ut.rows]
    for k in range(m):
        for i in range(k - 1, -1, -1):
            y = rows[i][k] / rows[i][i]
            q = y - p_fractional_part(y, p)  # in Z_(p)
            if q:
                for r in range(m):
                    rows[r][k] -= q * rows[r][i]
    return ExactMatrix(rows)


# ---------------------------------------------------------------------------
# Satake transform of the generators


def phi_scale2(j: int, m: int) -> int:
    """Doubled exponent of the normalising constant p^{-j(m-j)/2}."""
    return -j * (m - j)


def satake_of_phi(j: int, nu, m: int, p: int):
    """Satake transform of phi_j = p^{-j(m-j)/2} 1_{X_j} at nu.

    Each coset b K = u p^lam K contributes delta^{1/2}(p^lam) p^{-<lam, nu>}.
    ``nu=None`` returns the exact Laurent polynomial in X_i = p^{-nu_i}.
    """
    cosets = hecke_cosets(m, j, p)
    scale = HalfPowerLaurent.monomial(p, phi_scale2(j, m))
    if nu is None:
        names, X = laurent_variables(m, prefix="X")
        total = LaurentPoly(names)
        for b in cosets:
            lam = iwasawa_qp(b, p).exponents
            mono = LaurentPoly.const(names, 1)
            for x, l in zip(X, lam):
                mono = mono * x**l
            total = total + mono * (delta_B_half(lam, p) * scale)
        return total
    nu = [complex(v) for v in nu]
    total = 0j
    for b in cosets:
        lam = iwasawa_qp(b, p).exponents
        total += delta_B_half_numeric(lam, p) * p ** (-sum(l * v for l, v in zip(lam, nu)))
    return total * complex(scale)


# ---------------------------------------------------------------------------
# the old-form basis


def _wj_scale(j: int, n: int, p: int) -> HalfPowerLaurent:
    # p^{-j(n-1-j)/2} from phi_j and |det b|^{1/2} = p^{-j/2}
    return HalfPowerLaurent.monomial(p, phi_scale2(j, n - 1) - j)


def W_j_value(j: int, t, g, p: int | None = None, exact: bool = False):
    """W^(j)(g) as a finite sum over K\\X_j.

    ``t`` is a SatakeParam (numeric) or a list of LaurentPoly generators
    (exact, with cyclotomic phases kept).
    """
    if isinstance(t, SatakeParam):
        p = t.p if p is None else p
    g = ExactMatrix(g.rows) if isinstance(g, ExactMatrix) else ExactMatrix(g)
    n = g.nrows
    total = 0
    for b in hecke_cosets(n - 1, j, p).right_representatives():
        total = total + whittaker_at(t, g @ iota(b.inverse()), p, exact=exact)
    scale = _wj_scale(j, n, p)
    if exact or not isinstance(t, SatakeParam):
        return total * scale
    return complex(total) * complex(scale)


def W_j_value_via_iwasawa_of_h(j: int, t, g, p: int | None = None, exact: bool = False):
    """Second evaluation order: decompose each b^{-1} = u tau k first and
    use W(g iota(u tau)) (iota(k) lies in K, which fixes W0 on the right)."""
    if isinstance(t, SatakeParam):
        p = t.p if p is None else p
    n = g.nrows
    total = 0
    for b in hecke_cosets(n - 1, j, p).right_representatives():
        d = iwasawa_qp(b.inverse(), p)
        total = total + whittaker_at(t, g @ iota(d.u @ d.t), p, exact=exact)
    scale = _wj_scale(j, n, p)
    if exact or not isinstance(t, SatakeParam):
        return total * scale
    return complex(total) * complex(scale)


@dataclass
class TorusTable:
    """W^(j)(iota(p^lam)) for all lam in a box, as (phase, mu) data.

    The table depends only on (n, p, box); Satake parameters enter through
    batched Schur evaluations, so many parameters reuse one table.
    """

    n: int
    p: int
    lams: np.ndarray
    # per j: list of (lam index, complex phase, mu tuple)
    entries: dict = field(default_factory=dict)

    def values(self, j: int, t: SatakeParam) -> np.ndarray:
        rows = self.entries[j]
        out = np.zeros(len(self.lams), dtype=complex)
        if not rows:
            return out
        idx = np.array([r[0] for r in rows])
        ph = np.array([r[1] for r in rows])
        mus = np.array([r[2] for r in rows], dtype=np.int64)
        s = schur_numeric_batch(mus, t.array())
        dh = np.array([delta_B_half_numeric(mu, self.p) for mu in mus])
        np.add.at(out, idx, ph * dh * s)
        return out * complex(_wj_scale(j, self.n, self.p))


def _box(m: int, bound: int, low: int) -> np.ndarray:
    """Dominant lam in Z^m, gaps <= bound, low <= lam_m <= bound."""
    rng = np.arange(bound + 1, dtype=np.int64)
    last = np.arange(low, bound + 1, dtype=np.int64)
    grids = np.meshgrid(*([rng] * (m - 1) + [last]), indexing="ij")
    steps = np.stack([g.ravel() for g in grids], axis=1)
    return np.cumsum(steps[:, ::-1], axis=1)[:, ::-1]


@lru_cache(maxsize=None)
def torus_table(n: int, p: int, bound: int) -> TorusTable:
    m = n - 1
    # iota(p^lam b^{-1}) has Whittaker support only for lam_m >= -1
    lams = _box(m, bound, -1)
    table = TorusTable(n, p, lams)
    for j in range(n):
        rows = []
        invs = [b.inverse() for b in hecke_cosets(m, j, p).right_representatives()]
        for i, lam in enumerate(lams):
            a = ExactMatrix.diag([Fraction(p) ** int(l) for l in lam])
            for bi in invs:
                d = iwasawa_qp(a @ bi, p)
                mu = tuple(d.exponents) + (0,)
                if not all(x >= y for x, y in zip(mu, mu[1:])):
                    continue
                phase = psi_p(sum((d.u[k, k + 1] for k in range(m - 1)), Fraction(0)), p)
                rows.append((i, to_complex(phase), mu))
        table.entries[j] = rows
    return table


def gram_oracle(t: SatakeParam, bound: int) -> np.ndarray:
    """H_{jl} = <W^(j) | W^(l)> from truncated torus sums, j, l = 0..n-1."""
    n, p = t.n, t.p
    table = torus_table(n, p, bound)
    m = n - 1
    lams = table.lams
    # mirabolic measure on U0\G0 at p^lam: delta_{B0}^{-1}
    e2 = np.array([sum(int(l) * (m - 2 * k + 1) for k, l in enumerate(lam, start=1)) for lam in lams])
    w = float(p) ** e2.astype(float)
    vals = np.stack([table.values(j, t) for j in range(n)])
    H = (vals * w[None, :]) @ vals.conj().T
    return complex(zeta_p(n, p)) * H


# ---------------------------------------------------------------------------
# F and G matrices


def _check_params(t: SatakeParam, need_unitary: bool = True):
    if need_unitary and not t.unitary_generic:
        raise ValueError("Satake parameter is not in the unitary dual")
    if abs(np.prod(t.t) - 1) > 1e-10:
        raise ValueError("central character must be trivial (prod t_j = 1)")


def _check_nu(nu):
    if any(complex(v).real < 0 for v in nu):
        raise ValueError("need Re nu_j >= 0")


def F_matrix(nu, t: SatakeParam) -> np.ndarray:
    """F_{ij} = W^(n-i)(1) Z0(nu; conj W^(n-j)); only row n survives."""
    _check_nu(nu)
    n, p = t.n, t.p
    x = [p ** (-complex(v)) for v in nu]
    F = np.zeros((n, n), dtype=complex)
    for j in range(1, n + 1):
        F[n - 1, j - 1] = p ** (-(n - j) / 2) * complex(elementary(n - j, x))
    return F


def F_column_check(nu, t: SatakeParam, bound: int = 40) -> np.ndarray:
    """Z0(nu; conj W^(k)), k = 0..n-1, from truncated torus sums.

    Z(1/2, W0(nu) x conj W^(k)) = sum_lam W0(nu; p^lam) conj W^(k)(iota p^lam)
    delta_{B0}^{-1}(p^lam), divided by prod_i L(1/2 + nu_i, conj t).
    """
    n, p = t.n, t.p
    m = n - 1
    table = torus_table(n, p, bound)
    lams = table.lams
    keep = lams[:, -1] >= 0
    x = np.array([p ** (-complex(v)) for v in nu])
    w0 = np.zeros(len(lams), dtype=complex)
    e_half = np.array([sum(int(l) * (m - 2 * k + 1) for k, l in enumerate(lam, start=1)) for lam in lams])
    w0[keep] = schur_numeric_batch(lams[keep], x) * float(p) ** (-e_half[keep] / 2)
    measure = float(p) ** e_half.astype(float)
    Lref = 1 + 0j
    for v in nu:
        Lref *= local_L(0.5 + complex(v), t.conjugate())
    out = np.zeros(n, dtype=complex)
    for k in range(n):
        out[k] = np.sum(w0 * np.conj(table.values(k, t)) * measure) / Lref
    return out


def hermite_matrix(x) -> np.ndarray:
    return np.array([[complex(v) for v in row] for row in complete_matrix(list(x))], dtype=complex)


def G_closed(t: SatakeParam, sign: int | None = None) -> np.ndarray:
    """Closed form of G from  tG^{-1} = (-1)^{n-1} (1 - p^{-n}) H(x) D*(p^{-1}, x) R(-p).

    ``sign`` overrides the constant (-1)^{n-1}; the Gram oracle confirms the
    default for even n, where the two choices differ.
    """
    _check_params(t)
    n, p = t.n, t.p
    x = list(t.t)
    Hm = hermite_matrix(x)
    D = np.asarray(d_star(x, 1 / p), dtype=complex)
    R = np.diag([(-p) ** (n - i) for i in range(1, n + 1)]).astype(complex)
    c = (-1) ** (n - 1) if sign is None else sign
    tGinv = c * (1 - p ** (-n)) * Hm @ D @ R
    cond = np.linalg.cond(tGinv)
    if not np.isfinite(cond) or cond > GRAM_CONDITION_LIMIT:
        raise np.linalg.LinAlgError(f"closed-form G is numerically singular (condition {cond:.3g})")
    return np.linalg.inv(tGinv).T


def G_oracle(t: SatakeParam, bound: int) -> np.ndarray:
    """G_{ij} = <W^(n-i) | W^(n-j)> from truncated torus sums."""
    H = gram_oracle(t, bound)
    n = t.n
    rev = list(range(n - 1, -1, -1))
    return H[np.ix_(rev, rev)]


def G_matrix(t: SatakeParam, mode: str = "closed", bound: int = 30) -> np.ndarray:
    if mode == "closed":
        return G_closed(t)
    if mode == "oracle":
        _check_params(t)
        return G_oracle(t, bound)
    raise ValueError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# the local period


@dataclass
class PeriodReport:
    nu: tuple
    t: SatakeParam
    direct: complex | None
    trace: complex
    closed: complex
    reason: str = ""

    @property
    def routes(self) -> dict:
        return {"direct": self.direct, "trace": self.trace, "closed": self.closed}

    @property
    def discrepancies(self) -> dict:
        vals = {k: v for k, v in self.routes.items() if v is not None}
        return {f"{a}-{b}": abs(vals[a] - vals[b]) for a, b in itertools.combinations(vals, 2)}

    @property
    def bound_ratio(self) -> float:
        n, p = self.t.n, self.t.p
        return abs(self.closed) * p ** (1 + (n - 1) / (n * n + 1))

    def as_dict(self) -> dict:
        def c(z):
            return None if z is None else [z.real, z.imag]

        return {
            "nu": [c(complex(v)) for v in self.nu],
            "t": [c(v) for v in self.t.t],
            "p": self.t.p,
            "direct": c(self.direct),
            "trace": c(self.trace),
            "closed": c(self.closed),
            "discrepancies": self.discrepancies,
            "bound_ratio": self.bound_ratio,
            "reason": self.reason,
        }


def period_trace(nu, t: SatakeParam) -> complex:
    n, p = t.n, t.p
    G = G_closed(t)
    F = F_matrix(nu, t)
    L = rs_L(1, t, t.conjugate())
    return complex(L / (p**n - 1) * np.trace(np.linalg.solve(G, F)))


def period_closed(nu, t: SatakeParam) -> complex:
    """(L(1, pi x conj pi) / p^n) sum_i (-1)^{n-i} D*(1/p, t)_{ni} p^{(n-i)/2} e_{n-i}(p^{-nu})."""
    _check_params(t)
    _check_nu(nu)
    n, p = t.n, t.p
    D = np.asarray(d_star(list(t.t), 1 / p), dtype=complex)
    x = [p ** (-complex(v)) for v in nu]
    s = sum(
        (-1) ** (n - i) * D[n - 1, i - 1] * p ** ((n - i) / 2) * complex(elementary(n - i, x))
        for i in range(1, n + 1)
    )
    return complex(rs_L(1, t, t.conjugate()) / p**n * s)


def period_direct(nu, t: SatakeParam, bound: int = 30) -> complex:
    """Gram-Schmidt on W^(0), ..., W^(n-1) under the truncated inner product,
    then L(1) sum_k Z0(nu; conj V_k) V_k(1) / (p^n - 1)."""
    _check_nu(nu)
    n, p = t.n, t.p
    H = gram_oracle(t, bound)
    cond = np.linalg.cond(H)
    if cond > GRAM_CONDITION_LIMIT:
        raise np.linalg.LinAlgError(f"Gram matrix numerically singular (condition {cond:.3g})")
    x = [p ** (-complex(v)) for v in nu]
    z0 = np.array([p ** (-k / 2) * complex(elementary(k, x)) for k in range(n)])
    at_one = np.zeros(n, dtype=complex)
    at_one[0] = 1.0  # W^(j)(1) = delta_{j0}
    # classical Gram-Schmidt: V_k = sum_j A[j, k] W^(j)
    A = np.zeros((n, n), dtype=complex)
    for k in range(n):
        col = np.zeros(n, dtype=complex)
        col[k] = 1.0
        for i in range(k):
            coef = col @ H @ A[:, i].conj()  # <col | V_i>
            col = col - coef * A[:, i]
        norm = math.sqrt(abs((col @ H @ col.conj()).real))
        A[:, k] = col / norm
    total = 0j
    for k in range(n):
        total += (A[:, k].conj() @ z0) * (A[:, k] @ at_one)
    return complex(rs_L(1, t, t.conjugate()) * total / (p**n - 1))


def period(nu, t: SatakeParam, bound: int = 30) -> PeriodReport:
    nu = tuple(complex(v) for v in nu)
    trace = period_trace(nu, t)
    closed = period_closed(nu, t)
    direct, reason = None, ""
    try:
        direct = period_direct(nu, t, bound)
    except np.linalg.LinAlgError as exc:
        reason = f"direct route skipped: {exc}"
    return PeriodReport(nu, t, direct, trace, closed, reason)


# ---------------------------------------------------------------------------
# exact checks


def W_j_at_identity_exact(j: int, n: int, p: int):
    _, T = laurent_variables(n)
    return W_j_value(j, T, ExactMatrix.identity(n), p, exact=True)


def period_trace_minus_closed_symbolic(n: int) -> LaurentPoly:
    """Exact difference of the trace and closed period formulas, divided by
    L(1, pi x conj pi), over the variables T (Satake), X (= p^{-nu}) and
    P (= p^{1/2}); D*(Z, T) is specialised at Z = P^{-2}.

    The trace side uses the full product H D* R(-p) for tG^{-1}: with only
    row n of F nonzero, tr(G^{-1} F) = sum_j (tG^{-1})_{nj} F_{nj}.
    """
    dnames, Dsym = d_star_symbolic(n)
    names = dnames[:n] + tuple(f"X{i}" for i in range(1, n)) + ("P",)
    gens = LaurentPoly.gens(names)
    T, X, P = gens[:n], gens[n : 2 * n - 1], gens[-1]
    D = [[_substitute_d_star(Dsym[i][j], T, P) for j in range(n)] for i in range(n)]
    Hm = complete_matrix(T)
    one = LaurentPoly.const(names, 1)

    def e(k):
        return elementary(k, X) if k else one

    sign = (-1) ** (n - 1)
    trace = LaurentPoly(names)
    for j in range(1, n + 1):
        row = LaurentPoly(names)
        for k in range(n):
            row = row + Hm[n - 1][k] * D[k][j - 1]
        tg_inv = row * (sign * (-1) ** (n - j)) * P ** (2 * (n - j))
        trace = trace + tg_inv * P ** (-(n - j)) * e(n - j)
    # (1 - p^{-n}) / (p^n - 1) = p^{-n}
    trace = trace * P ** (-2 * n)
    closed = LaurentPoly(names)
    for i in range(1, n + 1):
        closed = closed + D[n - 1][i - 1] * ((-1) ** (n - i)) * P ** (n - i) * e(n - i)
    closed = closed * P ** (-2 * n)
    return trace - closed


def _substitute_d_star(poly: LaurentPoly, T, P) -> LaurentPoly:
    """Rewrite a D*(Z, T) entry over the larger variable list with Z = P^{-2}."""
    out = 0 * P
    for e, c in poly.terms.items():
        term = P ** (-2 * e[-1]) * c
        for ti, k in zip(T, e[:-1]):
            if k:
                term = term * ti**k
        out = out + term
    return out


# ---------------------------------------------------------------------------
# Luo-Rudnick-Sarnak scan


def lrs_theta(n: int) -> Fraction:
    return Fraction(1, n * n + 1)


def lrs_grid(n: int, p: int, points: int, seed: int = 0) -> list:
    """Admissible Satake parameters: trivial central character, unitary dual,
    |Re s_j| <= 1/2 - 1/(n^2 + 1).  n = 3 grids mix tempered and
    complementary-series points (t, 1/t conj-paired with a real shift)."""
    if n != 3:
        raise NotImplementedError("grids are generated for n = 3")
    rng = np.random.default_rng(seed)
    cap = 0.5 - float(lrs_theta(n))
    out = []
    for k in range(points):
        if k % 2 == 0:
            a, b = rng.uniform(-math.pi, math.pi, 2)
            t = (np.exp(1j * a), np.exp(1j * b), np.exp(-1j * (a + b)))
        else:
            # {p^{-sigma} e^{i a}, p^{sigma} e^{i a}, e^{-2 i a}}: unitary, det 1
            sigma = cap * (k % 7) / 6
            a = rng.uniform(-math.pi, math.pi)
            t = (p ** (-sigma) * np.exp(1j * a), p ** sigma * np.exp(1j * a), np.exp(-2j * a))
        out.append(SatakeParam(p, t))
    return out


def lrs_nu_grid() -> list:
    return [(0.0, 0.0), (0.5, 0.0), (1.0, 0.25), (0.0, 2.0)]


def lrs_bound_scan(n: int, primes, points: int = 200, seed: int = 0) -> dict:
    """Per-p supremum of |P| p^{1 + (n-1)/(n^2+1)} over the grid (closed route)."""
    report = {}
    for p in primes:
        best = 0.0
        for t in lrs_grid(n, p, points, seed):
            for nu in lrs_nu_grid():
                r = abs(period_closed(nu, t)) * p ** (1 + (n - 1) / (n * n + 1))
                if not math.isfinite(r):
                    raise ArithmeticError(f"non-finite period ratio at p={p}, t={t.t}")
                best = max(best, r)
        report[str(p)] = best
    return report


def load_lrs_baseline() -> dict:
    data = resources.files(__package__).joinpath("data/lrs_baseline.json").read_text()
    return json.loads(data)
