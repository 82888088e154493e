"""Exact descriptions of real inputs (shifts, coefficients) and their text codec.

Text forms, as used in JSON configs:

    "3", "-7/2"                      rational
    "surd:p,q,d,r"                   (p + q*sqrt(d)) / r, d > 0 not a square
    "dec:1.41421356...[!irr]"        decimal literal; "!irr" declares that it
                                     stands for an irrational number
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import ParseError
from .exact import ExactReal, squarefree_decompose

MIN_DECIMAL_DIGITS = 30

_INT = r"[+-]?\d+"
_RATIONAL_RE = re.compile(rf"({_INT})(?:/(\d+))?")
_SURD_RE = re.compile(rf"surd:({_INT}),({_INT}),(\d+),(\d+)")
_DEC_RE = re.compile(r"dec:([+-]?)(\d+)(?:\.(\d+))?(?:[eE]([+-]?\d+))?(!irr)?")


class RealSpec:
    """Base class for the three exact input variants."""

    def exact(self) -> ExactReal:
        raise NotImplementedError

    @property
    def certified_rational(self) -> bool:
        return False

    @property
    def certified_irrational(self) -> bool:
        return False

    def __float__(self) -> float:
        return float(self.exact())

    def encode(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class RationalSpec(RealSpec):
    num: int
    den: int = 1

    def __post_init__(self):
        if self.den <= 0:
            raise ValueError("denominator must be positive")

    def exact(self) -> ExactReal:
        return ExactReal.rational(Fraction(self.num, self.den))

    @property
    def certified_rational(self) -> bool:
        return True

    def encode(self) -> str:
        return str(self.num) if self.den == 1 else f"{self.num}/{self.den}"


@dataclass(frozen=True)
class SurdSpec(RealSpec):
    """(p + q*sqrt(d)) / r."""

    p: int
    q: int
    d: int
    r: int = 1

    def __post_init__(self):
        if self.r <= 0:
            raise ValueError("r must be positive")
        if self.d <= 0 or math.isqrt(self.d) ** 2 == self.d:
            raise ValueError(f"d={self.d} must be a positive non-square")

    def exact(self) -> ExactReal:
        return (ExactReal.rational(self.p) + ExactReal.sqrt(self.d, self.q)) / self.r

    @property
    def certified_rational(self) -> bool:
        return self.q == 0

    @property
    def certified_irrational(self) -> bool:
        return self.q != 0

    def encode(self) -> str:
        return f"surd:{self.p},{self.q},{self.d},{self.r}"


@dataclass(frozen=True)
class DecimalSpec(RealSpec):
    """digits * 10**exponent, with an optional declaration of irrationality.

    The value used in arithmetic is the literal itself; the flag only records
    that the literal truncates some irrational number.
    """

    digits: str
    exponent: int = 0
    declared_irrational: bool = False

    def __post_init__(self):
        if not re.fullmatch(r"[+-]?\d+", self.digits):
            raise ValueError(f"bad digit string {self.digits!r}")

    @property
    def significant_digits(self) -> int:
        return len(self.digits.lstrip("+-").lstrip("0"))

    def exact(self) -> ExactReal:
        n = int(self.digits)
        if self.exponent >= 0:
            return ExactReal.rational(n * 10**self.exponent)
        return ExactReal.rational(Fraction(n, 10**-self.exponent))

    @property
    def certified_rational(self) -> bool:
        return not self.declared_irrational

    def encode(self) -> str:
        digits = self.digits.lstrip("+")
        sign = ""
        if digits.startswith("-"):
            sign, digits = "-", digits[1:]
        body = f"{digits}e{self.exponent}" if self.exponent else digits
        return f"dec:{sign}{body}" + ("!irr" if self.declared_irrational else "")


def parse_real(text: str) -> RealSpec:
    """Parse the text form of a real; malformed strings raise ParseError."""
    if not isinstance(text, str):
        raise ParseError(f"expected a string, got {type(text).__name__}")
    s = text.strip()
    m = _RATIONAL_RE.fullmatch(s)
    if m:
        den = int(m.group(2)) if m.group(2) is not None else 1
        if den == 0:
            raise ParseError(f"zero denominator in {text!r}")
        f = Fraction(int(m.group(1)), den)
        return RationalSpec(f.numerator, f.denominator)
    m = _SURD_RE.fullmatch(s)
    if m:
        p, q, d, r = (int(g) for g in m.groups())
        try:
            return SurdSpec(p, q, d, r)
        except ValueError as exc:
            raise ParseError(f"{text!r}: {exc}") from None
    m = _DEC_RE.fullmatch(s)
    if m:
        sign, whole, frac, exp, irr = m.groups()
        frac = frac or ""
        exponent = (int(exp) if exp else 0) - len(frac)
        return DecimalSpec(sign + whole + frac, exponent, irr is not None)
    raise ParseError(f"malformed real {text!r}")


def parse_exact(text: str) -> ExactReal:
    """Parse a CLI numeric argument: any parse_real form or a plain decimal."""
    try:
        return parse_real(text).exact()
    except ParseError:
        pass
    if re.fullmatch(r"[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?", text.strip()):
        return ExactReal.rational(Fraction(text.strip()))
    raise ParseError(f"malformed number {text!r}")


def spec_from_exact(value: ExactReal) -> RealSpec:
    """Recover a RealSpec for an element of Q or of a single Q(sqrt(d))."""
    rad = value.radicands()
    if not rad:
        f = value.as_fraction()
        return RationalSpec(f.numerator, f.denominator)
    if len(rad) > 1:
        raise ValueError(f"{value!r} lies in no single quadratic field")
    d = rad[0]
    a, b = value.rational_part(), value.terms[d]
    r = math.lcm(a.denominator, b.denominator)
    return SurdSpec(int(a * r), int(b * r), d, r)


def surd_reduced_mod_one(n: int, coeff: int = 1) -> RealSpec:
    """coeff*sqrt(n) minus its integer part, as an exact surd in [0, 1)."""
    k, m = squarefree_decompose(n)
    value = ExactReal.sqrt(n, coeff)
    if m == 1:
        return RationalSpec(0)
    return SurdSpec(-value.floor(), coeff * k, m, 1)
