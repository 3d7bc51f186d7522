"""Batch driver: named verification suites and single computations.

Reports are JSON (default) or CSV.  Floats carry 17 significant digits,
exact rationals are also written as "num/den" strings.  Runtimes are only
included with ``--timings`` so that reports are byte-identical across runs.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import itertools
import json
import math
import os
import random
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, replace
from fractions import Fraction
from typing import Callable

import numpy as np

THREADS_ENV = "GLNLOCAL_THREADS"
CONFIG_SECTION = "glnlocal"
SUITES = ("symfun", "coset", "iwasawa", "whittaker", "oldforms", "plancherel")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(ValueError):
    pass


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class Config:
    default_p: int = 2
    default_n: int = 3
    lambda_bound: int = 40
    truncation_depth_k: int = 6
    tolerance: float = 1e-6
    quadrature_nodes: int = 64
    threads: int = 1
    seed: int = 0
    fuzz_scale: float = 1.0

    def validate(self) -> "Config":
        from .exactnum import is_prime

        checks = [
            (is_prime(self.default_p), "default_p must be prime"),
            (2 <= self.default_n <= 5, "default_n must lie in 2..5"),
            (self.lambda_bound >= 1, "lambda_bound must be positive"),
            (self.truncation_depth_k >= 1, "truncation_depth_k must be positive"),
            (self.tolerance > 0, "tolerance must be positive"),
            (self.quadrature_nodes >= 4, "quadrature_nodes must be at least 4"),
            (self.threads >= 1, "threads must be positive"),
            (self.seed >= 0, "seed must be non-negative"),
            (0 < self.fuzz_scale <= 10, "fuzz_scale must lie in (0, 10]"),
        ]
        for ok, msg in checks:
            if not ok:
                raise UsageError(msg)
        return self

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def scaled(self, size: int) -> int:
        return max(1, int(round(size * self.fuzz_scale)))


def _coerce_field(name: str, raw):
    kind = {f.name: f.type for f in fields(Config)}[name]
    try:
        if kind in ("int", int):
            value = float(raw) if isinstance(raw, str) else raw
            if value != int(value):
                raise ValueError
            return int(value)
        return float(raw)
    except (TypeError, ValueError):
        raise UsageError(f"bad value for {name}: {raw!r}") from None


def load_config(path: str | None = None, overrides: dict | None = None, environ=None) -> Config:
    """File < command-line overrides; the thread count can also come from
    the environment, which wins over both."""
    values = {}
    if path:
        parser = configparser.ConfigParser()
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read config file: {exc}") from None
        if not text.lstrip().startswith("["):
            text = f"[{CONFIG_SECTION}]\n" + text
        try:
            parser.read_string(text)
        except configparser.Error as exc:
            raise UsageError(f"malformed config file: {exc}") from None
        if not parser.has_section(CONFIG_SECTION):
            raise UsageError(f"config file needs a [{CONFIG_SECTION}] section")
        known = {f.name for f in fields(Config)}
        for key, raw in parser.items(CONFIG_SECTION):
            if key not in known:
                raise UsageError(f"unknown config key: {key}")
            values[key] = _coerce_field(key, raw)
    for key, raw in (overrides or {}).items():
        if raw is not None:
            values[key] = _coerce_field(key, raw)
    env = os.environ if environ is None else environ
    if env.get(THREADS_ENV):
        values["threads"] = _coerce_field("threads", env[THREADS_ENV])
    return Config(**values).validate()


# ---------------------------------------------------------------------------
# serialisation


def _num(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return "null"
    return format(x, ".17g")


def encode(obj) -> object:
    """Map results to JSON-ready values; exact rationals keep a string form."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return obj
    if isinstance(obj, Fraction):
        return {"value": float(obj), "exact": f"{obj.numerator}/{obj.denominator}"}
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [encode(v) for v in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [encode(v) for v in obj]
    return str(obj)


def dumps(obj, indent: int = 2) -> str:
    """JSON text with every float written to 17 significant digits."""
    obj = encode(obj)
    pad = " " * indent

    def walk(o, level):
        if isinstance(o, float):
            return _num(o)
        if isinstance(o, dict):
            if not o:
                return "{}"
            if len(o) <= 3 and all(not isinstance(v, (dict, list)) for v in o.values()):
                return "{" + ", ".join(f"{json.dumps(k)}: {walk(v, level)}" for k, v in o.items()) + "}"
            inner = ",\n".join(f"{pad * (level + 1)}{json.dumps(k)}: {walk(v, level + 1)}" for k, v in o.items())
            return "{\n" + inner + "\n" + pad * level + "}"
        if isinstance(o, list):
            if not o:
                return "[]"
            if all(not isinstance(v, list) and not (isinstance(v, dict) and len(v) > 3) for v in o) and len(o) <= 4:
                return "[" + ", ".join(walk(v, level) for v in o) + "]"
            if all(not isinstance(v, (dict, list)) for v in o):
                return "[" + ", ".join(walk(v, level) for v in o) + "]"
            inner = ",\n".join(pad * (level + 1) + walk(v, level + 1) for v in o)
            return "[\n" + inner + "\n" + pad * level + "]"
        return json.dumps(o)

    return walk(obj, 0) + "\n"


def _flat(v) -> str:
    e = encode(v)
    if isinstance(e, float):
        return _num(e)
    if isinstance(e, dict) and set(e) == {"value", "exact"}:
        return e["exact"]
    if isinstance(e, dict) and set(e) == {"re", "im"}:
        return f"{_num(e['re'])}{'+' if e['im'] >= 0 else '-'}{_num(abs(e['im']))}j"
    if e is None:
        return ""
    if isinstance(e, (dict, list)):
        return dumps(e, indent=0).replace("\n", "")
    return str(e)


# ---------------------------------------------------------------------------
# suite machinery


@dataclass(frozen=True)
class Outcome:
    passed: bool
    value: object = None
    reference: object = None
    error: float | None = None
    detail: str = ""
    skipped: bool = False


@dataclass(frozen=True)
class Case:
    id: str
    anchor: str
    run: Callable[[Config], Outcome]


@dataclass
class CaseResult:
    id: str
    anchor: str
    status: str
    value: object
    reference: object
    error: float | None
    runtime_ms: float
    detail: str = ""


@dataclass
class SuiteReport:
    suite: str
    cases: list
    config: dict = field(default_factory=dict)

    @property
    def failures(self) -> int:
        return sum(c.status == "fail" for c in self.cases)

    @property
    def exit_code(self) -> int:
        return EXIT_FAIL if self.failures else EXIT_OK

    def summary(self) -> dict:
        count = {s: sum(c.status == s for c in self.cases) for s in ("pass", "fail", "skip")}
        return {"cases": len(self.cases), **count}

    def as_dict(self, timings: bool = False) -> dict:
        rows = []
        for c in self.cases:
            rows.append({
                "id": c.id,
                "anchor": c.anchor,
                "status": c.status,
                "value": c.value,
                "reference": c.reference,
                "abs_error": c.error,
                "runtime_ms": round(c.runtime_ms, 3) if timings else None,
                "detail": c.detail,
            })
        return {"suite": self.suite, "summary": self.summary(), "config": self.config, "cases": rows}

    def to_json(self, timings: bool = False) -> str:
        return dumps(self.as_dict(timings))

    def to_csv(self, timings: bool = False) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["id", "anchor", "status", "value", "reference", "abs_error", "runtime_ms", "detail"])
        for c in self.cases:
            w.writerow([c.id, c.anchor, c.status, _flat(c.value), _flat(c.reference),
                        _flat(c.error), _flat(round(c.runtime_ms, 3)) if timings else "", c.detail])
        return buf.getvalue()


def _execute(case: Case, config: Config) -> CaseResult:
    start = time.perf_counter()
    try:
        out = case.run(config)
        status = "skip" if out.skipped else ("pass" if out.passed else "fail")
    except Exception as exc:  # a crashing case is a failure, not a crash of the suite
        out = Outcome(False, detail=f"{type(exc).__name__}: {exc}")
        status = "fail"
    ms = (time.perf_counter() - start) * 1e3
    return CaseResult(case.id, case.anchor, status, out.value, out.reference, out.error, ms, out.detail)


def run_suite(name: str, config: Config | None = None, only=None, exclude=()) -> SuiteReport:
    """Run a suite; ``only`` keeps the cases whose id starts with one of its
    prefixes, ``exclude`` drops those matching its prefixes."""
    config = (config or Config()).validate()
    if name == "all":
        cases = [c for s in SUITES for c in _SUITE_BUILDERS[s](config)]
    elif name in _SUITE_BUILDERS:
        cases = _SUITE_BUILDERS[name](config)
    else:
        raise UsageError(f"unknown suite {name!r}; choose from {', '.join(SUITES + ('all',))}")
    if only is not None:
        prefixes = tuple(only)
        cases = [c for c in cases if c.id.startswith(prefixes)]
    if exclude:
        cases = [c for c in cases if not c.id.startswith(tuple(exclude))]
    # cases are pure; map keeps the declared order
    with ThreadPoolExecutor(max_workers=config.threads) as pool:
        results = list(pool.map(lambda c: _execute(c, config), cases))
    return SuiteReport(name, results, config.as_dict())


def _close(value, reference, tol, relative=False, detail=""):
    err = float(abs(complex(value) - complex(reference)))
    scale = abs(complex(reference)) if relative else 1.0
    return Outcome(err <= tol * scale, value, reference, err, detail)


def _exact(ok: bool, value=None, reference=None, detail=""):
    return Outcome(bool(ok), value, reference, 0.0 if ok else None, detail)


def _tempered(rng, p: int, n: int):
    from .whittaker import SatakeParam

    a = rng.uniform(-math.pi, math.pi, n - 1)
    return SatakeParam(p, tuple(np.exp(1j * a)) + (np.exp(-1j * a.sum()),))


def _unitary_generic(rng, p: int, n: int, k: int, sigma_max: float = 0.15):
    """Tempered for even k; otherwise a complementary-series pair
    p^{-+sigma} e^{ia} completed to trivial central character (n >= 3)."""
    from .whittaker import SatakeParam

    if k % 2 == 0 or n < 3:
        return _tempered(rng, p, n)
    sigma = rng.uniform(0.0, sigma_max)
    a = rng.uniform(-math.pi, math.pi, n - 1)
    t = [p ** (-sigma) * np.exp(1j * a[0]), p**sigma * np.exp(1j * a[0])]
    t += list(np.exp(1j * a[1 : n - 2]))
    t.append(1 / np.prod(t))
    return SatakeParam(p, tuple(t))


# ---------------------------------------------------------------------------
# symfun suite


def _suite_symfun(cfg: Config) -> list:
    from .symfun import (
        d_matrix, d_star, elementary, laurent_variables, matmul, vandermonde,
        vandermonde_factorization, vandermonde_inverse, vandermonde_inverse_numerators,
        power_series_check, residue_identity_check,
    )

    cases = []

    def factorization(r):
        def run(_):
            _, T = laurent_variables(r)
            V, E, H, _ = vandermonde_factorization(T)
            return _exact(matmul(E, H) == [list(row) for row in V] or all(
                a == b for ra, rb in zip(matmul(E, H), V) for a, b in zip(ra, rb)), f"r={r}", "V = E H")
        return run

    def inverse(r):
        def run(_):
            _, T = laurent_variables(r)
            N, d = vandermonde_inverse_numerators(T)
            V = vandermonde(T)
            prod = matmul(V, N)
            ok = all(prod[i][j] == (d[j] if i == j else 0) for i in range(r) for j in range(r))
            return _exact(ok, f"r={r}", "V N = diag(d)")
        return run

    for r in range(1, 6):
        cases.append(Case(f"vandermonde-factorization-r{r}", "Vandermonde factorization V = E H", factorization(r)))
    for r in range(1, 5):
        cases.append(Case(f"vandermonde-inverse-r{r}", "Vandermonde inverse closed form", inverse(r)))

    def inverse_example(_):
        inv = vandermonde_inverse([1, 2])
        ref = [[Fraction(2), Fraction(-1)], [Fraction(-1), Fraction(1)]]
        return _exact(inv == ref, inv, ref)

    cases.append(Case("vandermonde-inverse-example", "Vandermonde inverse closed form", inverse_example))

    def random_inverse(cfg):
        rng = random.Random(cfg.seed)
        T = []
        while len(T) < 4:
            v = Fraction(rng.randint(-40, 40), rng.randint(1, 9))
            if v not in T:
                T.append(v)
        V = vandermonde(T)
        prod = matmul(V, vandermonde_inverse(T))
        ok = all(prod[i][j] == int(i == j) for i in range(4) for j in range(4))
        return _exact(ok, [str(t) for t in T], "V V^-1 = 1")

    cases.append(Case("vandermonde-inverse-rational-r4", "Vandermonde inverse closed form", random_inverse))

    rng = np.random.default_rng(cfg.seed)
    instances = []
    for k in range(20):
        n = 2 + k % 3
        while True:
            r = rng.uniform(0.05, 0.6, n)
            ang = rng.uniform(-math.pi, math.pi, n)
            x = r * np.exp(1j * ang)
            if min(abs(a - b) for a, b in itertools.combinations(x, 2)) > 0.05:
                break
        instances.append((n, x, int(rng.integers(0, n))))

    def residue(n, x, deg):
        def F(z):
            z = np.asarray(z)
            alt = 1.0
            for i, j in itertools.combinations(range(n - 1), 2):
                alt = alt * (z[j] - z[i])
            e = complex(1) if deg == 0 else elementary(min(deg, n - 1), list(z))
            return e * alt**2

        def run(cfg):
            nodes = cfg.quadrature_nodes if n <= 3 else min(cfg.quadrature_nodes, 64)
            lhs, rhs, _ = residue_identity_check(F, x, nodes=nodes)
            return _close(lhs, rhs, 1e-8, detail=f"n={n}, F=e_{min(deg, n - 1)} D^2")
        return run

    for k, (n, x, deg) in enumerate(instances, start=1):
        cases.append(Case(f"residue-lemma-{k:02d}", "residue lemma for the old-form basis", residue(n, x, deg)))

    def d_star_direct(cfg):
        rng = np.random.default_rng(cfg.seed + 1)
        worst = 0.0
        for n in (2, 3):
            T = list(np.exp(1j * rng.uniform(-math.pi, math.pi, n)))
            for Z in rng.uniform(-0.9, 0.9, 5):
                Ds = np.asarray(d_star(T, Z), dtype=complex)
                clear = np.prod(T) ** (n - 1) * np.prod([1 - Z * a / b for a in T for b in T])
                worst = max(worst, float(np.max(np.abs(Ds / clear - d_matrix(Z, T)))))
        return Outcome(worst <= 1e-9, worst, 0.0, worst, "cleared D* vs direct D, n=2,3")

    cases.append(Case("d-star-clearing", "cleared matrix D*(Z, T)", d_star_direct))

    def d_star_routes(cfg):
        rng = np.random.default_rng(cfg.seed + 2)
        T = list(rng.uniform(0.5, 2.0, 3))
        a = np.asarray(d_star(T, 0.3, method="symbolic"), dtype=complex)
        b = np.asarray(d_star(T, 0.3, method="series"), dtype=complex)
        err = float(np.max(np.abs(a - b)))
        return Outcome(err <= 1e-9 * max(1.0, float(np.max(np.abs(a)))), None, None, err, "symbolic vs series, n=3")

    cases.append(Case("d-star-routes", "cleared matrix D*(Z, T)", d_star_routes))

    def series(cfg):
        rng = np.random.default_rng(cfg.seed + 3)
        x = np.exp(1j * rng.uniform(-math.pi, math.pi, 3))
        err, _, _ = power_series_check(0.5, x, M=80)
        return Outcome(err <= 1e-9, err, 0.0, err, "order 80 at z=1/2")

    cases.append(Case("d-power-series", "power series of D(z, x)", series))
    return cases


# ---------------------------------------------------------------------------
# coset suite


def _random_gl(rng: random.Random, n: int):
    from .padiclinalg import ExactMatrix

    while True:
        rows = [[Fraction(rng.randint(-4, 4), rng.randint(1, 4)) if rng.random() > 0.25 else Fraction(0)
                 for _ in range(n)] for _ in range(n)]
        g = ExactMatrix(rows)
        if g.det():
            return g


def _suite_coset(cfg: Config) -> list:
    from .padiclinalg import ExactMatrix
    from .weylcoset import (
        Permutation, a_gamma, brute_force_SnQy, character_trivial_on, classify,
        enumerate_SnQy, in_Y, in_YQ, iota, stabilizer,
    )

    def roundtrip(n, size):
        def run(cfg):
            rng = random.Random(cfg.seed * 1000 + n)
            count = cfg.scaled(size)
            bad = 0
            for k in range(count):
                g = _random_gl(rng, n)
                c = classify(g)
                if c.reconstruct() != g or not in_Y(c.w, c.y):
                    bad += 1
                    continue
                if k % 10 == 0:
                    b = ExactMatrix([[Fraction(rng.randint(1, 5)) if i == j else Fraction(rng.randint(-3, 3)) if i < j else 0
                                      for j in range(n - 1)] for i in range(n - 1)])
                    u = ExactMatrix([[1 if i == j else Fraction(rng.randint(-3, 3)) if i < j else 0 for j in range(n)] for i in range(n)])
                    c2 = classify(iota(b) @ g @ u * Fraction(rng.randint(1, 6)))
                    bad += (c2.y, c2.w) != (c.y, c.w)
            return Outcome(bad == 0, count - bad, count, float(bad), f"{count} random matrices in GL{n}(Q)")
        return run

    cases = [
        Case("classify-roundtrip-gl3", "double coset decomposition", roundtrip(3, 1000)),
        Case("classify-roundtrip-gl4", "double coset decomposition", roundtrip(4, 200)),
    ]

    def permutation_cell(_):
        g = ExactMatrix([[0, 1, 0], [1, 0, 0], [0, 0, 1]])
        c = classify(g)
        ok = all(v == 0 for v in c.y) and c.w == Permutation((2, 1, 3))
        return _exact(ok, [str(v) for v in c.y] + [list(c.w.images)], [0, 0, [2, 1, 3]])

    cases.append(Case("classify-transposition", "double coset decomposition", permutation_cell))

    def patterns(n):
        I0 = range(1, n)
        for k in range(n):
            for Q in itertools.combinations(I0, k):
                Q = frozenset(Q)
                for y in itertools.product((0, 1), repeat=n - 1):
                    if in_YQ(Q, y, n):
                        yield Q, y

    def enumerate_vs_brute(n):
        def run(_):
            total = bad = 0
            for Q, y in patterns(n):
                total += 1
                fast = sorted(tuple(w.images) for w in enumerate_SnQy(Q, y, n))
                slow = sorted(tuple(w.images) for w in brute_force_SnQy(Q, y, n))
                bad += fast != slow
            return Outcome(bad == 0, total - bad, total, float(bad), f"all (Q, y) patterns, n={n}")
        return run

    def singleton(n):
        def run(_):
            sizes = []
            for k in range(n):
                for Q in itertools.combinations(range(1, n), k):
                    sizes.append(len(enumerate_SnQy(frozenset(Q), (0,) * (n - 1), n)))
            return _exact(all(s == 1 for s in sizes), max(sizes), 1, f"{len(sizes)} subsets Q, n={n}")
        return run

    for n in range(2, 6):
        cases.append(Case(f"enumerate-vs-brute-n{n}", "conditions (a)-(d) on S_n(Q, y)", enumerate_vs_brute(n)))
    for n in range(2, 6):
        cases.append(Case(f"y0-singleton-n{n}", "conditions (a)-(d) on S_n(Q, y)", singleton(n)))

    def character_oracle(n):
        def run(_):
            total = bad = 0
            for w in Permutation.all(n):
                for y in itertools.product((0, 1, 2), repeat=n - 1):
                    if not in_Y(w, y):
                        continue
                    total += 1
                    bad += a_gamma(y, w) != int(character_trivial_on(stabilizer(y, w)))
            return Outcome(bad == 0, total - bad, total, float(bad), f"all w in S_{n}, y in Y(w) with entries 0,1,2")
        return run

    for n in range(2, 5):
        cases.append(Case(f"a-gamma-oracle-n{n}", "nonvanishing of the stabilizer character", character_oracle(n)))
    return cases


# ---------------------------------------------------------------------------
# p-adic linear algebra suite


def _suite_iwasawa(cfg: Config) -> list:
    from .exactnum import valuation
    from .padiclinalg import (
        arch_gram_residual, arch_lower_iwasawa, explicit_lower_iwasawa, iwasawa_qp,
        lower_unipotent, vanishing_fuzz,
    )

    def explicit(n, p):
        def run(cfg):
            rng = random.Random(cfg.seed * 7919 + 31 * n + p)
            count = cfg.scaled(500)
            dens = [1, p, p**2, p**3, p**4, 7]
            bad = 0
            for _ in range(count):
                xi = [Fraction(rng.randint(-50, 50), rng.choice(dens)) for _ in range(n - 1)]
                d = explicit_lower_iwasawa(xi, p)
                nbar = lower_unipotent(xi)
                if d.upper() @ d.torus() @ d.kappa != nbar or not d.kappa.in_GL_Zp(p):
                    bad += 1
                    continue
                ours = tuple(valuation(a, p) for a in list(d.alpha) + [d.t])
                bad += ours != iwasawa_qp(nbar, p).exponents
            return Outcome(bad == 0, count - bad, count, float(bad), f"{count} inputs, n={n}, p={p}")
        return run

    cases = []
    for n, p in itertools.product((3, 4), (2, 3, 5)):
        cases.append(Case(f"explicit-iwasawa-n{n}-p{p}", "explicit Iwasawa decomposition at p", explicit(n, p)))

    def arch(cfg):
        rng = np.random.default_rng(cfg.seed)
        worst = 0.0
        for k in range(cfg.scaled(200)):
            xi = rng.normal(scale=3.0, size=2 + k % 3)
            worst = max(worst, arch_gram_residual(arch_lower_iwasawa(xi), xi))
        return Outcome(worst <= 1e-12, worst, 0.0, worst, "Gram identity, real place")

    cases.append(Case("arch-gram-identity", "explicit Iwasawa decomposition at the real place", arch))

    def vanishing(p):
        def run(cfg):
            scan = vanishing_fuzz(3, p, cfg.scaled(100_000), seed=cfg.seed)
            return Outcome(scan.ok, scan.forced_true, 0, float(scan.forced_true),
                           f"{scan.samples} samples, {scan.forced} under the hypothesis, {scan.control_true} control hits")
        return run

    for p in (2, 3):
        cases.append(Case(f"vanishing-fuzz-p{p}", "vanishing of the unipotent orbital integrals", vanishing(p)))
    return cases


# ---------------------------------------------------------------------------
# Whittaker suite


def _suite_whittaker(cfg: Config) -> list:
    from .whittaker import SatakeParam, jacquet_truncated, mirabolic_inner_truncated, zeta_truncated

    cases = []
    n = 3

    def zeta(p, k):
        def run(cfg):
            rng = np.random.default_rng(cfg.seed * 101 + 10 * p + k)
            t = _tempered(rng, p, n)
            nu = tuple(rng.uniform(-0.25, 0.25, n - 1) + 1j * rng.uniform(-2, 2, n - 1))
            r = zeta_truncated(1, nu, t, cfg.lambda_bound)
            return _close(r.value, r.reference, 1e-7, detail=f"z=1, Lambda={cfg.lambda_bound}")
        return run

    for p in (2, 3):
        for k in range(10):
            cases.append(Case(f"zeta-p{p}-{k:02d}", "unramified Rankin-Selberg zeta integral", zeta(p, k)))

    def zeta_trivial(cfg):
        r = zeta_truncated(1, (0, 0), SatakeParam(2, (1, 1, 1)), cfg.lambda_bound)
        return _close(r.value, r.reference, 1e-7, detail="t=(1,1,1), p=2, reference 64")

    cases.append(Case("zeta-trivial-p2", "unramified Rankin-Selberg zeta integral", zeta_trivial))

    def mirabolic(p, k):
        def run(cfg):
            rng = np.random.default_rng(cfg.seed * 211 + 10 * p + k)
            r = mirabolic_inner_truncated(_tempered(rng, p, n), cfg.lambda_bound)
            return _close(r.value, r.reference, cfg.tolerance, relative=True, detail="relative tolerance")
        return run

    for p in (2, 3):
        for k in range(3):
            cases.append(Case(f"mirabolic-p{p}-{k:02d}", "norm of the spherical Whittaker function", mirabolic(p, k)))

    def mirabolic_512(cfg):
        r = mirabolic_inner_truncated(SatakeParam(2, (1, 1, 1)), cfg.lambda_bound)
        exact = Fraction(512)
        ok = r.reference == 512 and r.error <= cfg.tolerance * 512
        return Outcome(ok, r.value, exact, r.error, "t=(1,1,1), p=2, relative tolerance")

    cases.append(Case("mirabolic-trivial-512", "norm of the spherical Whittaker function", mirabolic_512))

    def jacquet(nu, p, k, N, tol):
        def run(cfg):
            depth = cfg.truncation_depth_k if k is None else k
            r = jacquet_truncated(nu, p, depth, N)
            return _close(r.value, r.reference, tol, detail=f"k={depth}, N={N}")
        return run

    for p in (2, 3):
        for N in (1, p * p):
            cases.append(Case(f"jacquet-gl2-p{p}-N{N}", "singular orbital integral",
                              jacquet((1.5, -1.5), p, None, N, 1e-8)))
    for N in (1, 4):
        cases.append(Case(f"jacquet-gl3-p2-N{N}", "singular orbital integral", jacquet((1.5, 0, -1.5), 2, 3, N, 1e-5)))
    return cases


# ---------------------------------------------------------------------------
# old-form suite


def _suite_oldforms(cfg: Config) -> list:
    from .oldforms import (
        F_column_check, F_matrix, G_closed, G_matrix, W_j_at_identity_exact, hecke_cosets,
        load_lrs_baseline, lrs_bound_scan, period, period_trace_minus_closed_symbolic,
        satake_of_phi,
    )
    from .symfun import elementary, laurent_variables

    cases = []

    def wj_identity(n, p):
        def run(_):
            vals = [W_j_at_identity_exact(j, n, p) for j in range(n)]
            ok = vals[0] == 1 and all(not v for v in vals[1:])
            return _exact(ok, [str(v) for v in vals], [1] + [0] * (n - 1))
        return run

    for n, p in itertools.product((2, 3, 4), (2, 3)):
        cases.append(Case(f"wj-at-identity-n{n}-p{p}", "old-form basis at the identity", wj_identity(n, p)))

    def satake(m):
        def run(cfg):
            _, X = laurent_variables(m, prefix="X")
            ok = all(satake_of_phi(j, None, m, cfg.default_p) == elementary(j, X) for j in range(m + 1))
            return _exact(ok, f"m={m}", "e_j(X)")
        return run

    for m in (1, 2, 3):
        cases.append(Case(f"satake-of-phi-m{m}", "Satake transform of the Hecke generators", satake(m)))

    def coset_count(_):
        p = cfg.default_p
        counts = [len(hecke_cosets(3, j, p)) for j in range(4)]
        return _exact(counts == [1, p * p + p + 1, p * p + p + 1, 1], counts, [1, p * p + p + 1, p * p + p + 1, 1])

    cases.append(Case("hecke-coset-count-m3", "Hecke coset representatives", coset_count))

    def gram(cfg):
        rng = np.random.default_rng(cfg.seed + 5)
        t = _tempered(rng, cfg.default_p, cfg.default_n)
        err = float(np.max(np.abs(G_matrix(t, "oracle", cfg.lambda_bound) - G_closed(t))))
        return Outcome(err <= cfg.tolerance, None, None, err, f"n={cfg.default_n}, p={cfg.default_p}, Lambda={cfg.lambda_bound}")

    cases.append(Case("gram-closed-vs-oracle", "Gram matrix of the old-form basis", gram))

    def f_column(cfg):
        rng = np.random.default_rng(cfg.seed + 6)
        t = _tempered(rng, cfg.default_p, cfg.default_n)
        nu = tuple(rng.uniform(0.3, 0.6, cfg.default_n - 1) + 1j * rng.uniform(-1, 1, cfg.default_n - 1))
        got = F_column_check(nu, t, cfg.lambda_bound)
        ref = F_matrix(nu, t)[-1, ::-1]
        err = float(np.max(np.abs(got - ref)))
        return Outcome(err <= cfg.tolerance, None, None, err, "torus-sum oracle vs closed F")

    cases.append(Case("f-matrix-column", "zeta integrals of the old-form basis", f_column))

    def routes(k, n=None, p=None):
        def run(cfg):
            nn, pp = n or cfg.default_n, p or cfg.default_p
            rng = np.random.default_rng(cfg.seed * 7 + k)
            t = _unitary_generic(rng, pp, nn, k)
            nu = tuple(rng.uniform(0, 1, nn - 1) + 1j * rng.uniform(-1, 1, nn - 1))
            # the n = 4 Gram table grows like Lambda^3; cap it
            bound = cfg.lambda_bound if nn <= 3 else min(cfg.lambda_bound, 12)
            rep = period(nu, t, bound)
            if rep.direct is None:
                return Outcome(False, rep.closed, None, None, rep.reason)
            worst = max(rep.discrepancies.values())
            scale = max(1.0, abs(rep.closed))
            return Outcome(worst <= cfg.tolerance * scale, rep.closed, rep.direct, worst,
                           f"n={nn}, p={pp}, Lambda={bound}, max pairwise discrepancy")
        return run

    for k in range(20):
        cases.append(Case(f"period-routes-{k + 1:02d}", "local Whittaker period", routes(k)))
    cases.append(Case("period-routes-n2", "local Whittaker period", routes(0, n=2, p=3)))

    def symbolic(n):
        def run(_):
            diff = period_trace_minus_closed_symbolic(n)
            return _exact(not diff, str(diff), "0")
        return run

    for n in (2, 3):
        cases.append(Case(f"period-trace-vs-closed-symbolic-n{n}", "local Whittaker period", symbolic(n)))

    def lrs(cfg):
        base = load_lrs_baseline()
        got = lrs_bound_scan(base["n"], [int(p) for p in base["sup_ratio"]], base["points"], base["seed"])
        errs = {p: abs(got[p] - v) / v for p, v in base["sup_ratio"].items()}
        worst = max(errs.values())
        finite = all(math.isfinite(v) for v in got.values())
        return Outcome(finite and worst <= 1e-9, got, base["sup_ratio"], worst, "relative, per-p suprema")

    cases.append(Case("lrs-baseline", "bound towards Ramanujan for the period", lrs))
    return cases


# ---------------------------------------------------------------------------
# Plancherel suite


def _suite_plancherel(cfg: Config) -> list:
    from .oldforms import hecke_cosets
    from .plancherel import arch_c_bound_check, padic_mass, padic_parseval, shift_off_hyperplanes

    cases = []

    def mass(p):
        def run(cfg):
            top = cfg.quadrature_nodes
            errs = [padic_mass(p, 3, top // 4).error, padic_mass(p, 3, top // 2).error]
            res = padic_mass(p, 3, top)
            errs.append(res.error)
            shrinking = errs[0] > errs[1] > errs[2] or errs[2] <= 1e-13
            return Outcome(res.error <= 1e-6 and shrinking, res.value, 1.0, res.error,
                           "errors at nodes/4, nodes/2, nodes: " + ", ".join(f"{e:.3e}" for e in errs))
        return run

    for p in (2, 3, 5):
        cases.append(Case(f"padic-mass-p{p}", "p-adic Plancherel density", mass(p)))

    def parseval(cfg):
        p, n, j = 2, 3, 1
        res = padic_parseval(p, n, j, points=max(cfg.quadrature_nodes, 128))
        count = len(hecke_cosets(n, j, p))
        oracle = Fraction(count, p ** (j * (n - j)))
        ok = abs(res.lhs - float(oracle)) <= 1e-5 and count == 7
        return Outcome(ok, res.lhs, oracle, abs(res.lhs - float(oracle)), f"{count} cosets")

    cases.append(Case("padic-parseval-n3-j1", "p-adic Plancherel density", parseval))

    def arch(_):
        rep = arch_c_bound_check(3)
        ok = rep.c_bound_inf > 0 and rep.exponent_stable
        return Outcome(ok, rep.exponent, rep.exponent_extended, abs(rep.exponent - rep.exponent_extended),
                       f"inf of |c| bound {rep.c_bound_inf:.6g}")

    cases.append(Case("arch-c-bound", "archimedean Plancherel density bounds", arch))

    def shift(nu0):
        def run(cfg):
            delta, mu, cert = shift_off_hyperplanes(nu0, samples=cfg.scaled(10_000), seed=cfg.seed)
            return Outcome(cert.ok, cert.passed, cert.samples, float(cert.samples - cert.passed),
                           f"delta={delta}, mu={[str(m) for m in mu]}")
        return run

    points = [
        (Fraction(1, 2), Fraction(-1, 2), Fraction(3, 2)),
        (Fraction(0), Fraction(1), Fraction(2), Fraction(1, 3)),
        (Fraction(0), Fraction(0), Fraction(0)),
        (Fraction(1, 5), Fraction(6, 5), Fraction(-3, 7)),
    ]
    for k, nu0 in enumerate(points, start=1):
        cases.append(Case(f"shift-off-hyperplanes-{k}", "moving off the singular hyperplanes", shift(nu0)))
    return cases


_SUITE_BUILDERS = {
    "symfun": _suite_symfun,
    "coset": _suite_coset,
    "iwasawa": _suite_iwasawa,
    "whittaker": _suite_whittaker,
    "oldforms": _suite_oldforms,
    "plancherel": _suite_plancherel,
}


# ---------------------------------------------------------------------------
# single computations


def _complex_list(text: str) -> list:
    try:
        return [complex(s.strip().replace(" ", "")) for s in text.split(",") if s.strip()]
    except ValueError:
        raise UsageError(f"cannot parse numbers from {text!r}") from None


def _rational_list(text: str) -> list:
    try:
        return [Fraction(s.strip()) for s in text.split(",") if s.strip()]
    except ValueError:
        raise UsageError(f"cannot parse rationals from {text!r}") from None


def _int_set(text: str | None) -> frozenset:
    if not text:
        return frozenset()
    try:
        return frozenset(int(s) for s in text.split(",") if s.strip())
    except ValueError:
        raise UsageError(f"cannot parse indices from {text!r}") from None


def _satake(args, cfg: Config):
    from .whittaker import SatakeParam

    n = args.n or cfg.default_n
    p = args.p or cfg.default_p
    if args.satake:
        t = _complex_list(args.satake)
    else:
        t = [1.0] * n
    if len(t) != n:
        raise UsageError(f"need {n} Satake parameters, got {len(t)}")
    return SatakeParam(p, tuple(t))


def compute(args, cfg: Config) -> dict:
    cmd = args.command
    if cmd == "period":
        from .oldforms import period

        t = _satake(args, cfg)
        nu = _complex_list(args.nu) if args.nu else [0.0] * (t.n - 1)
        bound = args.lambda_bound or cfg.lambda_bound
        rep = period(nu, t, bound)
        return {"command": "period", "inputs": {"n": t.n, "p": t.p, "satake": list(t.t), "nu": nu, "lambda_bound": bound},
                "routes": rep.routes, "discrepancies": rep.discrepancies, "bound_ratio": rep.bound_ratio,
                "reason": rep.reason}
    if cmd == "zeta":
        from .whittaker import zeta_truncated

        t = _satake(args, cfg)
        nu = _complex_list(args.nu) if args.nu else [0.0] * (t.n - 1)
        bound = args.lambda_bound or cfg.lambda_bound
        z = complex(args.z)
        r = zeta_truncated(z, nu, t, bound)
        return {"command": "zeta", "inputs": {"n": t.n, "p": t.p, "satake": list(t.t), "nu": nu, "z": z, "lambda_bound": bound},
                "value": r.value, "reference": r.reference, "abs_error": r.error}
    if cmd == "mirabolic":
        from .whittaker import mirabolic_inner_truncated

        t = _satake(args, cfg)
        bound = args.lambda_bound or cfg.lambda_bound
        r = mirabolic_inner_truncated(t, bound)
        return {"command": "mirabolic", "inputs": {"n": t.n, "p": t.p, "satake": list(t.t), "lambda_bound": bound},
                "value": r.value, "reference": r.reference, "abs_error": r.error}
    if cmd == "jacquet":
        from .whittaker import jacquet_truncated

        p = args.p or cfg.default_p
        k = args.k or cfg.truncation_depth_k
        nu = _complex_list(args.nu)
        r = jacquet_truncated(nu, p, k, args.N)
        return {"command": "jacquet", "inputs": {"p": p, "k": k, "N": args.N, "nu": nu},
                "value": r.value, "reference": r.reference, "abs_error": r.error}
    if cmd == "coset":
        from .weylcoset import classify, enumerate_SnQy

        if args.action == "classify":
            try:
                rows = json.loads(args.matrix)
                g = [[Fraction(str(v)) for v in r] for r in rows]
            except (ValueError, TypeError):
                raise UsageError("--matrix must be a JSON list of rows") from None
            c = classify(g)
            return {"command": "coset classify", "inputs": {"matrix": [[str(v) for v in r] for r in g]},
                    "y": list(c.y), "w": list(c.w.images), "z": c.z,
                    "b": [list(r) for r in c.b.rows], "u": [list(r) for r in c.u.rows]}
        n = args.n or cfg.default_n
        Q = _int_set(args.Q)
        y = _rational_list(args.y) if args.y else [Fraction(0)] * (n - 1)
        ws = enumerate_SnQy(Q, y, n)
        return {"command": "coset enumerate", "inputs": {"n": n, "Q": sorted(Q), "y": y},
                "permutations": [list(w.images) for w in ws]}
    if cmd == "plancherel":
        from . import plancherel as pl

        n = args.n or cfg.default_n
        p = args.p or cfg.default_p
        nodes = args.nodes or cfg.quadrature_nodes
        if args.action == "mass":
            r = pl.padic_mass(p, n, nodes)
            return {"command": "plancherel mass", "inputs": {"n": n, "p": p, "nodes": nodes},
                    "value": r.value, "reference": 1.0, "abs_error": r.error}
        if args.action == "parseval":
            r = pl.padic_parseval(p, n, args.j, nodes)
            return {"command": "plancherel parseval", "inputs": {"n": n, "p": p, "j": args.j, "nodes": nodes},
                    "lhs": r.lhs, "rhs": r.rhs, "abs_error": r.error}
        if args.action == "arch-bounds":
            r = pl.arch_c_bound_check(n)
            return {"command": "plancherel arch-bounds", "inputs": {"n": n},
                    "c_bound_inf": r.c_bound_inf, "exponent": r.exponent, "exponent_extended": r.exponent_extended,
                    "constant": r.constant, "exponent_stable": r.exponent_stable}
        nu0 = _rational_list(args.nu)
        delta, mu, cert = pl.shift_off_hyperplanes(nu0, samples=args.samples, seed=cfg.seed)
        return {"command": "plancherel shift", "inputs": {"nu": nu0, "samples": args.samples},
                "delta": delta, "mu": list(mu), "on_pairs": [list(pq) for pq in cert.on_pairs],
                "passed": cert.passed, "min_margin": cert.min_margin}
    if cmd == "lrs-scan":
        from .oldforms import lrs_bound_scan

        primes = [int(p) for p in args.primes.split(",")]
        got = lrs_bound_scan(3, primes, args.points, cfg.seed)
        return {"command": "lrs-scan", "inputs": {"n": 3, "primes": primes, "points": args.points, "seed": cfg.seed},
                "sup_ratio": got}
    raise UsageError(f"unknown command {cmd!r}")


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value file, section [glnlocal]")
    common.add_argument("--p", type=int, help="prime (default_p)")
    common.add_argument("--n", type=int, help="rank (default_n)")
    common.add_argument("--lambda-bound", type=int, help="truncation of lattice sums")
    common.add_argument("--k", type=int, help="Jacquet truncation depth")
    common.add_argument("--tolerance", type=float)
    common.add_argument("--nodes", type=int, help="quadrature nodes per torus direction")
    common.add_argument("--threads", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--fuzz-scale", type=float, help="multiplier for fuzz corpus sizes")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--output", help="write the report here instead of stdout")
    common.add_argument("--timings", action="store_true", help="include per-case runtimes")

    parser = argparse.ArgumentParser(prog="glnlocal", description="Local computations for GL(n) relative trace formulas.")
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("suite", parents=[common], help="run a verification suite")
    s.add_argument("name", choices=SUITES + ("all",))

    s = sub.add_parser("period", parents=[common], help="local Whittaker period by three routes")
    s.add_argument("--satake", help="comma-separated Satake parameters (complex allowed)")
    s.add_argument("--nu", help="comma-separated spectral parameters, n-1 of them")

    s = sub.add_parser("zeta", parents=[common], help="truncated zeta integral against its L-value")
    s.add_argument("--satake")
    s.add_argument("--nu")
    s.add_argument("--z", default="1")

    s = sub.add_parser("mirabolic", parents=[common], help="truncated mirabolic inner product")
    s.add_argument("--satake")

    s = sub.add_parser("jacquet", parents=[common], help="truncated Jacquet integral")
    s.add_argument("--nu", required=True)
    s.add_argument("--N", type=int, default=1, help="level")

    s = sub.add_parser("coset", parents=[common], help="double cosets")
    s.add_argument("action", choices=("classify", "enumerate"))
    s.add_argument("--matrix", help="JSON rows, e.g. '[[0,1],[1,0]]'")
    s.add_argument("--Q", help="comma-separated subset of 1..n-1")
    s.add_argument("--y", help="comma-separated rationals, n-1 of them")

    s = sub.add_parser("plancherel", parents=[common], help="Plancherel checks")
    s.add_argument("action", choices=("mass", "parseval", "arch-bounds", "shift"))
    s.add_argument("--j", type=int, default=1)
    s.add_argument("--nu", help="rational point for 'shift'")
    s.add_argument("--samples", type=int, default=10_000)

    s = sub.add_parser("lrs-scan", parents=[common], help="period bound ratios over admissible grids")
    s.add_argument("--primes", default="2,3,5,7,11")
    s.add_argument("--points", type=int, default=200)
    return parser


def _config_from_args(args) -> Config:
    overrides = {
        "default_p": args.p,
        "default_n": args.n,
        "lambda_bound": args.lambda_bound,
        "truncation_depth_k": args.k,
        "tolerance": args.tolerance,
        "quadrature_nodes": args.nodes,
        "threads": args.threads,
        "seed": args.seed,
        "fuzz_scale": args.fuzz_scale,
    }
    return load_config(args.config, overrides)


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _record_csv(record: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["key", "value"])
    for k, v in record.items():
        w.writerow([k, _flat(v)])
    return buf.getvalue()


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = _config_from_args(args)
        if args.command == "suite":
            report = run_suite(args.name, cfg)
            text = report.to_csv(args.timings) if args.format == "csv" else report.to_json(args.timings)
            _emit(text, args.output)
            return report.exit_code
        if args.command == "coset" and args.action == "classify" and not args.matrix:
            raise UsageError("coset classify needs --matrix")
        if args.command == "plancherel" and args.action == "shift" and not args.nu:
            raise UsageError("plancherel shift needs --nu")
        record = compute(args, replace(cfg))
    except UsageError as exc:
        print(f"glnlocal: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, ZeroDivisionError, NotImplementedError, np.linalg.LinAlgError) as exc:
        print(f"glnlocal: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _emit(_record_csv(record) if args.format == "csv" else dumps(record), args.output)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
