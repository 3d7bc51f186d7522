"""Plancherel densities for PGL(n) at p and at the real place.

p-adic: on the compact torus {s in (R/(2 pi/log p)Z)^n : sum s = 0} with
total volume 1,

    d mu(s) = Q_p / n! * |c(is)|^{-2} d0 s,     Q_p = sum_w p^{-l(w)},
    c(s) = prod_{i<j} zeta_p(s_i - s_j) / zeta_p(s_i - s_j + 1).

Real place: the same shape with Gamma_R in place of zeta_p.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np
from scipy.special import loggamma

from .exactnum import _check_prime
from .symfun import gaussian_binomial


def poincare_polynomial(n: int, q: float) -> float:
    """sum_{w in S_n} q^{l(w)} = prod_{j=1}^n (1 - q^j)/(1 - q)."""
    return math.prod((1 - q**j) / (1 - q) for j in range(1, n + 1))


def padic_constant(p: int, n: int) -> float:
    """zeta_p(1)^n Delta_{G,p}(1)^{-1} / n!, Delta_{G,p}(1) = prod_{j<=n} zeta_p(j)."""
    return poincare_polynomial(n, 1 / p) / math.factorial(n)


def _zeta_p(z, p):
    return 1 / (1 - np.exp(-np.asarray(z, dtype=complex) * math.log(p)))


def padic_c(s, p: int) -> complex:
    """c(i s) from zeta_p at imaginary arguments; infinite on walls."""
    s = np.asarray(s, dtype=float)
    period = 2 * math.pi / math.log(p)
    out = 1 + 0j
    for i, j in itertools.combinations(range(len(s)), 2):
        d = s[i] - s[j]
        if abs(math.remainder(d, period)) < 1e-15:
            return complex(math.inf, 0)
        out *= _zeta_p(1j * d, p) / _zeta_p(1j * d + 1, p)
    return complex(out)


def padic_density(s, p: int, n: int | None = None) -> float:
    """Density of the Plancherel measure against d0 s at s."""
    _check_prime(p)
    s = np.asarray(s, dtype=float)
    n = len(s) if n is None else n
    if len(s) != n:
        raise ValueError("s must have n coordinates")
    # |c|^{-2} = prod |1 - u|^2 / |1 - u/p|^2 with u = p^{-i(s_i - s_j)}; zero on walls
    val = 1.0
    for i, j in itertools.combinations(range(n), 2):
        u = np.exp(-1j * (s[i] - s[j]) * math.log(p))
        val *= abs(1 - u) ** 2 / abs(1 - u / p) ** 2
    return padic_constant(p, n) * val


def padic_density_rational(x, p: int) -> float:
    """The same density written in the torus coordinates x_k = p^{-i s_k}."""
    n = len(x)
    num = 1.0
    den = 1.0
    for i, j in itertools.combinations(range(n), 2):
        num *= abs(x[j] - x[i]) ** 2
        den *= abs(x[j] - x[i] / p) ** 2
    return padic_constant(p, n) * num / den


@dataclass(frozen=True)
class TorusGrid:
    """Uniform grid on the sum-zero torus; s_n = -(s_1 + ... + s_{n-1})."""

    p: int
    n: int
    points: int

    def nodes(self) -> np.ndarray:
        period = 2 * math.pi / math.log(self.p)
        ax = np.arange(self.points) * (period / self.points)
        mesh = np.meshgrid(*([ax] * (self.n - 1)), indexing="ij")
        free = np.stack([m.ravel() for m in mesh], axis=1)
        return np.concatenate([free, -free.sum(axis=1, keepdims=True)], axis=1)

    @property
    def weight(self) -> float:
        return 1.0 / self.points ** (self.n - 1)


def _density_on(nodes: np.ndarray, p: int) -> np.ndarray:
    n = nodes.shape[1]
    val = np.ones(len(nodes))
    for i, j in itertools.combinations(range(n), 2):
        u = np.exp(-1j * (nodes[:, i] - nodes[:, j]) * math.log(p))
        val *= np.abs(1 - u) ** 2 / np.abs(1 - u / p) ** 2
    return padic_constant(p, n) * val


def _fsum(a: np.ndarray) -> float:
    return math.fsum(a.tolist())


class QuadratureResult(NamedTuple):
    value: float
    error: float


def padic_mass(p: int, n: int, points: int = 64) -> QuadratureResult:
    """Total Plancherel mass (the inversion formula at phi = 1_{ZK}); should be 1."""
    grid = TorusGrid(p, n, points)
    val = _fsum(_density_on(grid.nodes(), p)) * grid.weight
    return QuadratureResult(val, abs(val - 1))


class Parseval(NamedTuple):
    lhs: float
    rhs: float
    error: float


def padic_parseval(p: int, n: int, j: int, points: int = 128) -> Parseval:
    """int |hat phi_j|^2 d mu  vs  ||phi_j||^2 = p^{-j(n-j)} [n choose j]_p."""
    if not 1 <= j <= n - 1:
        raise ValueError("need 1 <= j <= n - 1")
    grid = TorusGrid(p, n, points)
    nodes = grid.nodes()
    sat = _elementary_batch(np.exp(-1j * nodes * math.log(p)), j)
    lhs = _fsum(np.abs(sat) ** 2 * _density_on(nodes, p)) * grid.weight
    rhs = float(Fraction(gaussian_binomial(n, j, p), p ** (j * (n - j))))
    return Parseval(lhs, rhs, abs(lhs - rhs))


def _elementary_batch(x: np.ndarray, j: int) -> np.ndarray:
    """e_j of each row of x (vectorised generating-function recursion)."""
    e = np.zeros((x.shape[0], j + 1), dtype=complex)
    e[:, 0] = 1
    for k in range(x.shape[1]):
        for l in range(j, 0, -1):
            e[:, l] += x[:, k] * e[:, l - 1]
    return e[:, j]


# ---------------------------------------------------------------------------
# real place


def log_gamma_R(s) -> complex:
    """log Gamma_R(s) = -(s/2) log pi + log Gamma(s/2)."""
    s = np.asarray(s, dtype=complex)
    return -(s / 2) * math.log(math.pi) + loggamma(s / 2)


def arch_constant(n: int) -> float:
    """Delta_{G,inf}(1)^{-1} / n! with Delta_{G,inf}(1) = prod_{j<=n} Gamma_R(j)."""
    log_delta = sum(float(np.real(log_gamma_R(j))) for j in range(1, n + 1))
    return math.exp(-log_delta) / math.factorial(n)


def arch_log_abs_c(s) -> float:
    """log |c(i s)| with c(s) = prod_{i<j} Gamma_R(s_i - s_j) / Gamma_R(s_i - s_j + 1)."""
    s = np.asarray(s, dtype=float)
    total = 0.0
    for i, j in itertools.combinations(range(len(s)), 2):
        d = 1j * (s[i] - s[j])
        if d == 0:
            return math.inf
        total += float(np.real(log_gamma_R(d) - log_gamma_R(d + 1)))
    return total


def arch_density(s, n: int | None = None) -> float:
    s = np.asarray(s, dtype=float)
    n = len(s) if n is None else n
    lc = arch_log_abs_c(s)
    if math.isinf(lc):
        return 0.0
    return arch_constant(n) * math.exp(-2 * lc)


def dominant_grid(n: int, radius: float, steps: int) -> np.ndarray:
    """Dominant sum-zero real s with gaps on a uniform mesh in [0, radius]."""
    if n < 2:
        raise ValueError("need n >= 2")
    ax = np.linspace(0, radius, steps)
    mesh = np.meshgrid(*([ax] * (n - 1)), indexing="ij")
    gaps = np.stack([m.ravel() for m in mesh], axis=1)
    s = np.concatenate([np.zeros((len(gaps), 1)), -np.cumsum(gaps, axis=1)], axis=1)
    s -= s.mean(axis=1, keepdims=True)
    return s


def log_growth_quantity(s, nu) -> float:
    """log |M_{G,inf}(-i s)^{-1} prod_j L(1/2 + nu_j, I(-i s))|."""
    s = np.asarray(s, dtype=float)
    total = 0.0
    for i, j in itertools.combinations(range(len(s)), 2):
        total -= float(np.real(log_gamma_R(1 - 1j * (s[i] - s[j]))))
    for v in nu:
        for sk in s:
            total += float(np.real(log_gamma_R(0.5 + complex(v) - 1j * sk)))
    return total


@dataclass
class ArchBoundReport:
    c_bound_inf: float
    exponent: float
    constant: float
    exponent_extended: float
    max_violation: float

    @property
    def exponent_stable(self) -> bool:
        return abs(self.exponent_extended - self.exponent) <= 0.1 * abs(self.exponent)


def _fit_envelope(s_all: np.ndarray, g: np.ndarray, radius: float, shells: int = 12):
    """Least-squares line through (log(1 + R), max of g over the shell at R)."""
    norms = np.linalg.norm(s_all, axis=1)
    edges = np.geomspace(radius / 2**4, radius, shells + 1)
    xs, ys = [], []
    for lo, hi in zip(edges, edges[1:]):
        sel = (norms > lo) & (norms <= hi)
        if sel.any():
            xs.append(math.log1p(hi))
            ys.append(float(g[sel].max()))
    r, c = np.polyfit(xs, ys, 1)
    return float(r), float(c)


def arch_c_bound_check(n: int = 3, radius: float = 50.0, steps: int = 60, nus=None, extended: float = 100.0) -> ArchBoundReport:
    """Pointwise checks of the lower bound for |c| and polynomial growth of
    M^{-1} prod L on dominant grids (radius, then 2 x radius)."""
    if nus is None:
        nus = [(0.0,) * (n - 1), tuple([0.25] * (n - 1)), tuple(0.1 + 0.5j * k for k in range(n - 1))]
    s_all = dominant_grid(n, radius, steps)
    prods = np.ones(len(s_all))
    for i, j in itertools.combinations(range(n), 2):
        prods *= np.sqrt(1 + s_all[:, i] - s_all[:, j])
    cb = np.array([math.exp(arch_log_abs_c(s)) if np.all(np.diff(s) < 0) else math.inf for s in s_all]) * prods
    c_inf = float(cb[np.isfinite(cb)].min())

    def growth(s_grid):
        return np.array([max(log_growth_quantity(s, nu) for nu in nus) for s in s_grid])

    g = growth(s_all)
    r, c = _fit_envelope(s_all, g, radius)
    ext = dominant_grid(n, extended, steps)
    r2, _ = _fit_envelope(ext, growth(ext), extended)
    viol = float(np.max(g - (r * np.log1p(np.linalg.norm(s_all, axis=1)) + c)))
    return ArchBoundReport(c_inf, r, c + max(viol, 0.0), r2, viol)


# ---------------------------------------------------------------------------
# moving a parameter off the hyperplanes nu_i - nu_j = +-1


@dataclass
class ShiftCertificate:
    delta: Fraction
    mu: tuple
    on_pairs: tuple
    samples: int
    passed: int
    min_margin: float

    @property
    def ok(self) -> bool:
        return self.passed == self.samples


def on_hyperplane(nu) -> bool:
    """Exact for rationals; 1e-12 margin for floats."""
    for a, b in itertools.combinations(nu, 2):
        d = a - b
        if isinstance(d, Fraction) or isinstance(d, int):
            if abs(d) == 1:
                return True
        elif abs(abs(d) - 1) <= 1e-12:
            return True
    return False


def _two_colouring(m: int, edges) -> list:
    colour = [None] * m
    adj = {i: [] for i in range(m)}
    for i, j in edges:
        adj[i].append(j)
        adj[j].append(i)
    for start in range(m):
        if colour[start] is not None:
            continue
        colour[start] = 0
        stack = [start]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if colour[w] is None:
                    colour[w] = 1 - colour[v]
                    stack.append(w)
                elif colour[w] == colour[v]:
                    raise AssertionError("differences of +-1 along an odd cycle cannot sum to zero")
    return colour


def shift_off_hyperplanes(nu0, samples: int = 10_000, seed: int = 0):
    """(delta, mu, certificate) with nu + mu off every hyperplane nu_i - nu_j = +-1
    whenever ||nu - nu0|| < delta/8.

    Pairs already on a hyperplane get |mu_i - mu_j| = 3 delta/4; all other
    differences of mu are 0 or 3 delta/4, below the gap C to the hyperplanes.
    """
    nu0 = tuple(Fraction(v) for v in nu0)
    m = len(nu0)
    pairs = list(itertools.combinations(range(m), 2))
    on = [(i, j) for i, j in pairs if abs(nu0[i] - nu0[j]) == 1]
    gaps = [abs(abs(nu0[i] - nu0[j]) - 1) for i, j in pairs if (i, j) not in on]
    C = min(gaps) if gaps else Fraction(1)
    delta = C / 4
    colour = _two_colouring(m, on)
    raw = [Fraction(3, 4) * delta * c for c in colour]
    mean = sum(raw, Fraction(0)) / m
    mu = tuple(x - mean for x in raw)
    cert = _certify(nu0, delta, mu, samples, seed)
    cert.on_pairs = tuple(on)
    return delta, mu, cert


def _certify(nu0, delta, mu, samples, seed) -> ShiftCertificate:
    rng = random.Random(seed)
    m = len(nu0)
    r = delta / 8
    denom = 10**6
    passed = 0
    margin = math.inf
    for _ in range(samples):
        while True:
            off = [Fraction(rng.randint(-denom, denom), denom) * r for _ in range(m)]
            if sum(o * o for o in off) < r * r:
                break
        nu = [a + o for a, o in zip(nu0, off)]
        shifted = [a + b for a, b in zip(nu, mu)]
        if not on_hyperplane(shifted):
            passed += 1
        for a, b in itertools.combinations(shifted, 2):
            margin = min(margin, float(abs(abs(a - b) - 1)))
    return ShiftCertificate(delta, tuple(mu), (), samples, passed, margin)
