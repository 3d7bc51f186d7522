"""Exact scalars: rationals with p-adic valuation, cyclotomic values of
prime-power order, formal half-integer powers of p, and one numeric
embedding into complex doubles."""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache
from numbers import Rational as _RationalABC

DEFAULT_TOL = 1e-9

Rational = Fraction


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, _RationalABC)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot read {x!r} as a rational number")


@lru_cache(maxsize=None)
def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


def _check_prime(p) -> None:
    if not isinstance(p, int) or not is_prime(p):
        raise ValueError(f"{p!r} is not a prime")


def _int_val(a: int, p: int) -> int:
    v = 0
    while a % p == 0:
        a //= p
        v += 1
    return v


def valuation(x, p: int):
    """p-adic valuation; ``math.inf`` for zero."""
    _check_prime(p)
    x = as_fraction(x)
    if x == 0:
        return math.inf
    return _int_val(x.numerator, p) - _int_val(x.denominator, p)


def abs_p(x, p: int) -> Fraction:
    v = valuation(x, p)
    if v == math.inf:
        return Fraction(0)
    return Fraction(p) ** (-v)


def unit_part(x, p: int) -> Fraction:
    """x / p^valuation(x)."""
    x = as_fraction(x)
    if x == 0:
        raise ValueError("zero has no unit part")
    return x / Fraction(p) ** valuation(x, p)


def is_p_integral(x, p: int) -> bool:
    x = as_fraction(x)
    return x.denominator % p != 0


def p_fractional_part(x, p: int) -> Fraction:
    """Representative in [0,1) of the class of x in Z[1/p]/Z, i.e. the
    part of x that is not p-integral."""
    _check_prime(p)
    x = as_fraction(x)
    d = x.denominator
    k = _int_val(d, p)
    if k == 0:
        return Fraction(0)
    pk = p**k
    rest = d // pk
    u = (x.numerator * pow(rest, -1, pk)) % pk
    return Fraction(u, pk)


class Cyclotomic:
    """Element of Q(zeta_{p^k}) in the power basis 1, z, ..., z^{phi-1}.

    Values of different orders over the same prime are lifted to the larger
    order; mixing different primes raises ``ValueError``.
    """

    __slots__ = ("p", "k", "coeffs")

    def __init__(self, p: int, k: int, coeffs):
        if k == 0:
            p = 1
        self.p = p
        self.k = k
        self.coeffs = tuple(as_fraction(c) for c in coeffs)
        if len(self.coeffs) != self.degree:
            raise ValueError("coefficient vector has the wrong length")
        self._drop_order()

    @property
    def order(self) -> int:
        return self.p**self.k if self.k else 1

    @property
    def degree(self) -> int:
        return 1 if self.k == 0 else (self.p - 1) * self.p ** (self.k - 1)

    @classmethod
    def rational(cls, x) -> "Cyclotomic":
        return cls(1, 0, (as_fraction(x),))

    @classmethod
    def root_of_unity(cls, p: int, k: int, e: int) -> "Cyclotomic":
        """zeta_{p^k}^e."""
        if k == 0:
            return cls.rational(1)
        return cls._from_dict(p, k, {e % p**k: Fraction(1)})

    @classmethod
    def _from_dict(cls, p: int, k: int, terms: dict) -> "Cyclotomic":
        if k == 0:
            return cls.rational(sum(terms.values(), Fraction(0)))
        order = p**k
        step = p ** (k - 1)
        deg = (p - 1) * step
        acc = [Fraction(0)] * order
        for e, c in terms.items():
            acc[e % order] += c
        # zeta^{(p-1)step + r} = -sum_{i<p-1} zeta^{i*step + r}
        for e in range(order - 1, deg - 1, -1):
            c = acc[e]
            if c:
                acc[e] = Fraction(0)
                r = e - (p - 1) * step
                for i in range(p - 1):
                    acc[i * step + r] -= c
        obj = cls.__new__(cls)
        obj.p, obj.k, obj.coeffs = p, k, tuple(acc[:deg])
        obj._drop_order()
        return obj

    def _drop_order(self) -> None:
        # Shrink to the smallest order containing the value.
        while self.k >= 1:
            if self.k == 1:
                if all(c == 0 for c in self.coeffs[1:]):
                    self.p, self.k, self.coeffs = 1, 0, (self.coeffs[0],)
                return
            # order p^k -> p^{k-1}: only exponents divisible by p may appear
            if any(c != 0 for i, c in enumerate(self.coeffs) if i % self.p):
                return
            self.coeffs = tuple(self.coeffs[:: self.p])
            self.k -= 1

    def _terms(self) -> dict:
        return {i: c for i, c in enumerate(self.coeffs) if c}

    def _lifted(self, k: int) -> dict:
        if self.k == 0:
            return {0: self.coeffs[0]} if self.coeffs[0] else {}
        s = self.p ** (k - self.k)
        return {i * s: c for i, c in enumerate(self.coeffs) if c}

    @staticmethod
    def _coerce(x) -> "Cyclotomic":
        if isinstance(x, Cyclotomic):
            return x
        return Cyclotomic.rational(as_fraction(x))

    def _common(self, other: "Cyclotomic"):
        if self.k and other.k and self.p != other.p:
            raise ValueError("mixed cyclotomic orders are not supported")
        p = self.p if self.k else other.p
        return p, max(self.k, other.k)

    def __add__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        p, k = self._common(other)
        t = self._lifted(k)
        for e, c in other._lifted(k).items():
            t[e] = t.get(e, Fraction(0)) + c
        return Cyclotomic._from_dict(p, k, t)

    __radd__ = __add__

    def __neg__(self):
        obj = Cyclotomic.__new__(Cyclotomic)
        obj.p, obj.k, obj.coeffs = self.p, self.k, tuple(-c for c in self.coeffs)
        return obj

    def __sub__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            obj = Cyclotomic.__new__(Cyclotomic)
            obj.p, obj.k = self.p, self.k
            obj.coeffs = tuple(c * other for c in self.coeffs)
            if other == 0:
                obj.p, obj.k, obj.coeffs = 1, 0, (Fraction(0),)
            return obj
        if not isinstance(other, Cyclotomic):
            return NotImplemented
        p, k = self._common(other)
        a, b = self._lifted(k), other._lifted(k)
        t: dict = {}
        for e1, c1 in a.items():
            for e2, c2 in b.items():
                t[e1 + e2] = t.get(e1 + e2, Fraction(0)) + c1 * c2
        return Cyclotomic._from_dict(p, k, t)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / as_fraction(other))
        if isinstance(other, Cyclotomic):
            terms = other._terms()
            if len(terms) == 1:
                (e, c), = terms.items()
                inv = Cyclotomic.root_of_unity(other.p, other.k, -e) * (1 / c)
                return self * inv
            raise ValueError("division by a non-monomial cyclotomic value")
        return NotImplemented

    def conjugate(self) -> "Cyclotomic":
        if self.k == 0:
            return self
        t = {(-e): c for e, c in self._terms().items()}
        return Cyclotomic._from_dict(self.p, self.k, t)

    def is_rational(self) -> bool:
        return self.k == 0

    def __bool__(self):
        return any(self.coeffs)

    def __eq__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return (self - other).k == 0 and not (self - other).coeffs[0]

    def __hash__(self):
        if self.k == 0:
            return hash(self.coeffs[0])
        return hash((self.p, self.k, self.coeffs))

    def to_complex(self) -> complex:
        if self.k == 0:
            return complex(float(self.coeffs[0]))
        z = cmath.exp(2j * math.pi / self.order)
        return sum((float(c) * z**i for i, c in enumerate(self.coeffs) if c), 0j)

    def __complex__(self):
        return self.to_complex()

    def __repr__(self):
        if self.k == 0:
            return f"Cyclotomic({self.coeffs[0]})"
        parts = [f"{c}*z^{i}" for i, c in enumerate(self.coeffs) if c]
        return f"Cyclotomic[{self.order}](" + " + ".join(parts) + ")"


def psi_p(x, p: int) -> Cyclotomic:
    """exp(2 pi i frac_p(x)) as an exact root of unity of p-power order."""
    f = p_fractional_part(x, p)
    if f == 0:
        return Cyclotomic.rational(1)
    k = _int_val(f.denominator, p)
    return Cyclotomic.root_of_unity(p, k, f.numerator)


class HalfPowerLaurent:
    """Finite sum  sum_m c_m p^{m/2}  with exact coefficients (Fraction or
    Cyclotomic). Exponents are stored doubled so they stay integers."""

    __slots__ = ("p", "terms")

    def __init__(self, p: int, terms=None):
        self.p = p
        # fold p^{e/2} = p^{(e - r)/2} p^{r/2}, r in {0, 1}: basis {1, p^{1/2}}
        acc: dict = {}
        for e2, c in (terms or {}).items():
            if not c:
                continue
            e2 = int(e2)
            r = e2 % 2
            scale = Fraction(p) ** ((e2 - r) // 2)
            c = c * scale
            acc[r] = acc[r] + c if r in acc else c
        self.terms = {e: c for e, c in acc.items() if c}

    @classmethod
    def monomial(cls, p: int, half_exponent2: int, coeff=Fraction(1)) -> "HalfPowerLaurent":
        """coeff * p^{half_exponent2 / 2}."""
        return cls(p, {half_exponent2: coeff})

    @classmethod
    def const(cls, p: int, c) -> "HalfPowerLaurent":
        return cls(p, {0: c})

    def _coerce(self, x) -> "HalfPowerLaurent":
        if isinstance(x, HalfPowerLaurent):
            if x.p != self.p:
                raise ValueError("different primes")
            return x
        if isinstance(x, (int, Fraction, Cyclotomic)):
            return HalfPowerLaurent(self.p, {0: x})
        raise TypeError(f"cannot combine HalfPowerLaurent with {type(x).__name__}")

    def __add__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        t = dict(self.terms)
        for e, c in other.terms.items():
            t[e] = t[e] + c if e in t else c
        return HalfPowerLaurent(self.p, t)

    __radd__ = __add__

    def __neg__(self):
        return HalfPowerLaurent(self.p, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        t: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = e1 + e2
                v = c1 * c2
                t[e] = t[e] + v if e in t else v
        return HalfPowerLaurent(self.p, t)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / as_fraction(other))
        other = self._coerce(other)
        if len(other.terms) == 1:
            (e, c), = other.terms.items()
            if isinstance(c, Cyclotomic):
                inv = Cyclotomic.rational(1) / c
            else:
                inv = Fraction(1) / c
            return self * HalfPowerLaurent(self.p, {-e: inv})
        raise ValueError("division by a non-monomial value")

    def conjugate(self) -> "HalfPowerLaurent":
        return HalfPowerLaurent(
            self.p,
            {e: (c.conjugate() if isinstance(c, Cyclotomic) else c) for e, c in self.terms.items()},
        )

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return not (self - other).terms

    def __hash__(self):
        return hash((self.p, frozenset(self.terms.items())))

    def to_complex(self) -> complex:
        r = math.sqrt(self.p)
        return sum((to_complex(c) * r**e for e, c in self.terms.items()), 0j)

    def __complex__(self):
        return self.to_complex()

    def __repr__(self):
        parts = [f"({c!r})*p^({e}/2)" for e, c in sorted(self.terms.items())]
        return f"HalfPowerLaurent[p={self.p}](" + (" + ".join(parts) or "0") + ")"


def to_complex(x, bindings=None) -> complex:
    """Standard embedding: zeta_{p^k} -> exp(2 pi i / p^k), p^{1/2} -> sqrt(p).

    Objects with free variables (LaurentPoly) need ``bindings``.
    """
    if isinstance(x, (int, float, complex)):
        return complex(x)
    if isinstance(x, Fraction):
        return complex(float(x))
    if isinstance(x, (Cyclotomic, HalfPowerLaurent)):
        return x.to_complex()
    if hasattr(x, "evaluate"):
        if bindings is None:
            raise ValueError("unbound variables")
        return to_complex(x.evaluate(bindings))
    if hasattr(x, "to_complex"):
        return x.to_complex()
    raise TypeError(f"no numeric embedding for {type(x).__name__}")


def close(a, b, tol: float = DEFAULT_TOL) -> bool:
    return abs(to_complex(a) - to_complex(b)) <= tol
