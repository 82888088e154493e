"""Exact arithmetic in multiquadratic fields Q(sqrt(d1), sqrt(d2), ...).

Every real accepted by the package is either rational or a quadratic surd, so
sums, products and quotients of inputs stay inside a multiquadratic field.
Elements are stored in the basis {sqrt(m) : m squarefree}, which is linearly
independent over Q; that makes equality, rationality of ratios and signs
decidable.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Union

Rational = Union[int, Fraction]


@lru_cache(maxsize=4096)
def squarefree_decompose(n: int) -> tuple[int, int]:
    """Return (k, m) with n == k*k*m and m squarefree."""
    if n <= 0:
        raise ValueError(f"expected a positive integer, got {n}")
    k, m = 1, 1
    rest = n
    p = 2
    while p * p <= rest:
        e = 0
        while rest % p == 0:
            rest //= p
            e += 1
        k *= p ** (e // 2)
        if e % 2:
            m *= p
        p += 1 if p == 2 else 2
    return k, m * rest


@lru_cache(maxsize=4096)
def _prime_factors(m: int) -> tuple[int, ...]:
    out = []
    p = 2
    while p * p <= m:
        if m % p == 0:
            out.append(p)
            while m % p == 0:
                m //= p
        p += 1 if p == 2 else 2
    if m > 1:
        out.append(m)
    return tuple(out)


def _floor_div(a: int, b: int) -> int:
    return a // b


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


class ExactReal:
    """An element sum(c_m * sqrt(m)) of a multiquadratic field, c_m rational."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: dict[int, Fraction] | None = None):
        clean = {}
        if terms:
            for m, c in terms.items():
                if c:
                    clean[m] = Fraction(c)
        self._terms = clean
        self._hash = None

    # construction -----------------------------------------------------
    @classmethod
    def rational(cls, value: Rational) -> "ExactReal":
        return cls({1: Fraction(value)})

    @classmethod
    def sqrt(cls, n: int, coeff: Rational = 1) -> "ExactReal":
        """coeff * sqrt(n) for a positive integer n."""
        k, m = squarefree_decompose(n)
        return cls({m: Fraction(coeff) * k})

    @classmethod
    def coerce(cls, value) -> "ExactReal":
        if isinstance(value, ExactReal):
            return value
        if isinstance(value, bool):
            raise TypeError("booleans are not reals")
        if isinstance(value, (int, Fraction)):
            return cls.rational(value)
        if isinstance(value, float):
            if not math.isfinite(value):
                raise ValueError(f"non-finite value {value!r}")
            return cls.rational(Fraction(value))
        exact = getattr(value, "exact", None)
        if callable(exact):
            return exact()
        raise TypeError(f"cannot convert {type(value).__name__} to ExactReal")

    # inspection -------------------------------------------------------
    @property
    def terms(self) -> dict[int, Fraction]:
        return dict(self._terms)

    def radicands(self) -> list[int]:
        return sorted(m for m in self._terms if m != 1)

    def is_zero(self) -> bool:
        return not self._terms

    def is_rational(self) -> bool:
        return all(m == 1 for m in self._terms)

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self!r} is irrational")
        return self._terms.get(1, Fraction(0))

    def rational_part(self) -> Fraction:
        return self._terms.get(1, Fraction(0))

    def has_rational_ratio(self, other: "ExactReal") -> bool:
        """True iff self/other is rational (other must be nonzero)."""
        if other.is_zero():
            raise ZeroDivisionError("ratio with zero denominator")
        if self.is_zero():
            return True
        if set(self._terms) != set(other._terms):
            return False
        it = iter(self._terms)
        m0 = next(it)
        r = self._terms[m0] / other._terms[m0]
        return all(self._terms[m] == r * other._terms[m] for m in it)

    # arithmetic -------------------------------------------------------
    def __add__(self, other):
        try:
            other = ExactReal.coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self._terms)
        for m, c in other._terms.items():
            out[m] = out.get(m, 0) + c
        return ExactReal(out)

    __radd__ = __add__

    def __neg__(self):
        return ExactReal({m: -c for m, c in self._terms.items()})

    def __pos__(self):
        return self

    def __sub__(self, other):
        try:
            other = ExactReal.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return ExactReal.coerce(other) - self

    def __mul__(self, other):
        try:
            other = ExactReal.coerce(other)
        except TypeError:
            return NotImplemented
        out: dict[int, Fraction] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                g = math.gcd(m1, m2)
                m = (m1 // g) * (m2 // g)
                out[m] = out.get(m, 0) + c1 * c2 * g
        return ExactReal(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        result = ExactReal.rational(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def _conjugate(self, p: int) -> "ExactReal":
        return ExactReal({m: (-c if m % p == 0 else c) for m, c in self._terms.items()})

    def inverse(self) -> "ExactReal":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        num = ExactReal.rational(1)
        den = self
        primes = sorted({p for m in self._terms for p in _prime_factors(m)})
        for p in primes:
            conj = den._conjugate(p)
            num = num * conj
            den = den * conj
        # den is now rational: each conjugation removes one prime from the support
        return num * ExactReal.rational(1 / den.as_fraction())

    def __truediv__(self, other):
        try:
            other = ExactReal.coerce(other)
        except TypeError:
            return NotImplemented
        if other.is_rational():
            q = other.as_fraction()
            if q == 0:
                raise ZeroDivisionError("division by zero")
            return ExactReal({m: c / q for m, c in self._terms.items()})
        return self * other.inverse()

    def __rtruediv__(self, other):
        return ExactReal.coerce(other) / self

    # ordering ---------------------------------------------------------
    def enclosure(self, bits: int) -> tuple[int, int]:
        """Integers (lo, hi) with lo <= self * 2**bits <= hi.

        hi - lo is at most the number of irrational basis terms; rational
        values give the exact floor and ceiling.
        """
        lo = hi = 0
        scale = 1 << bits
        for m, c in self._terms.items():
            a, b = c.numerator, c.denominator
            if m == 1:
                lo += _floor_div(a * scale, b)
                hi += _ceil_div(a * scale, b)
                continue
            r = math.isqrt(a * a * m * scale * scale)
            f = r // b
            if a > 0:
                lo += f
                hi += f + 1
            else:
                lo -= f + 1
                hi -= f
        return lo, hi

    def sign(self) -> int:
        if not self._terms:
            return 0
        if self.is_rational():
            q = self.as_fraction()
            return (q > 0) - (q < 0)
        bits = 64
        while True:
            lo, hi = self.enclosure(bits)
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            bits *= 2

    def floor(self) -> int:
        if self.is_rational():
            return math.floor(self.as_fraction())
        bits = 64
        while True:
            lo, hi = self.enclosure(bits)
            if lo >> bits == hi >> bits:
                return lo >> bits
            bits *= 2

    def ceil(self) -> int:
        return -((-self).floor())

    def __float__(self) -> float:
        if self.is_rational():
            return float(self.as_fraction())
        bits = 64
        while True:
            lo, hi = self.enclosure(bits)
            flo = float(Fraction(lo, 1 << bits))
            if flo == float(Fraction(hi, 1 << bits)) or bits > 8192:
                return flo
            bits += 64

    def _cmp(self, other) -> int:
        return (self - ExactReal.coerce(other)).sign()

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __eq__(self, other):
        try:
            other = ExactReal.coerce(other)
        except TypeError:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            if self.is_rational():
                self._hash = hash(self.as_fraction())
            else:
                self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self._terms)

    def __repr__(self):
        if not self._terms:
            return "ExactReal(0)"
        parts = []
        for m in sorted(self._terms):
            c = self._terms[m]
            parts.append(str(c) if m == 1 else f"{c}*sqrt({m})")
        return "ExactReal(" + " + ".join(parts) + ")"

    def to_decimal_string(self, digits: int = 30) -> str:
        """Decimal expansion truncated toward zero after `digits` places."""
        scale = 10**digits
        n = (abs(self) * scale).floor()
        whole, frac = divmod(n, scale)
        sign = "-" if self.sign() < 0 else ""
        return f"{sign}{whole}.{frac:0{digits}d}" if digits else f"{sign}{whole}"


def continued_fraction(x) -> Iterator[int]:
    """Partial quotients of an exact real; terminates iff x is rational."""
    x = ExactReal.coerce(x)
    while True:
        a = x.floor()
        yield a
        rest = x - a
        if rest.is_zero():
            return
        x = rest.inverse()
