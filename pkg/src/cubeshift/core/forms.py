"""Forms, windows and boxes, plus exact evaluation and the window test."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Iterator, Sequence, Union

from .errors import DimensionError, ParseError, UndecidableError
from .exact import ExactReal
from .reals import MIN_DECIMAL_DIGITS, DecimalSpec, RealSpec, parse_real

DEFAULT_BITS = 96
ESCALATED_BITS = 192


def _as_spec(value) -> RealSpec:
    if isinstance(value, RealSpec):
        return value
    if isinstance(value, str):
        return parse_real(value)
    if isinstance(value, (int, Fraction)) and not isinstance(value, bool):
        from .reals import RationalSpec

        f = Fraction(value)
        return RationalSpec(f.numerator, f.denominator)
    raise TypeError(f"cannot interpret {value!r} as a RealSpec")


def _check_decimal(spec: RealSpec) -> None:
    if isinstance(spec, DecimalSpec) and spec.significant_digits < MIN_DECIMAL_DIGITS:
        raise ValueError(
            f"decimal {spec.encode()} has {spec.significant_digits} significant digits; "
            f"at least {MIN_DECIMAL_DIGITS} are required for evaluation"
        )


@dataclass(frozen=True)
class ShiftedCubeForm:
    """F(x) = sum_i (x_i - mu_i)**3."""

    shifts: tuple[RealSpec, ...]

    def __post_init__(self):
        shifts = tuple(_as_spec(m) for m in self.shifts)
        if not shifts:
            raise ValueError("a form needs at least one variable")
        object.__setattr__(self, "shifts", shifts)

    @property
    def s(self) -> int:
        return len(self.shifts)

    @cached_property
    def exact_shifts(self) -> tuple[ExactReal, ...]:
        for m in self.shifts:
            _check_decimal(m)
        return tuple(m.exact() for m in self.shifts)

    def term(self, i: int, x: int) -> ExactReal:
        return (x - self.exact_shifts[i]) ** 3

    def floor_shift(self, i: int) -> int:
        return self.exact_shifts[i].floor()

    def permuted(self, order: Sequence[int]) -> "ShiftedCubeForm":
        return ShiftedCubeForm(tuple(self.shifts[i] for i in order))

    def to_json(self) -> dict:
        return {"shifts": [m.encode() for m in self.shifts]}


@dataclass(frozen=True)
class CubicPolynomial:
    """beta3*x**3 + beta2*x**2 + beta1*x + beta0 with beta3 != 0."""

    beta3: RealSpec
    beta2: RealSpec
    beta1: RealSpec
    beta0: RealSpec

    def __post_init__(self):
        for name in ("beta3", "beta2", "beta1", "beta0"):
            object.__setattr__(self, name, _as_spec(getattr(self, name)))
        if self.beta3.exact().is_zero():
            raise ValueError("leading coefficient must be nonzero")

    @classmethod
    def shifted_cube(cls, mu) -> "CubicPolynomial":
        """(x - mu)**3 for mu in Q or a single quadratic field."""
        from .reals import spec_from_exact

        m = _as_spec(mu).exact()
        return cls(1, spec_from_exact(-3 * m), spec_from_exact(3 * m * m), spec_from_exact(-(m**3)))

    @property
    def coefficients(self) -> tuple[RealSpec, RealSpec, RealSpec, RealSpec]:
        """(beta3, beta2, beta1, beta0)."""
        return (self.beta3, self.beta2, self.beta1, self.beta0)

    @cached_property
    def exact_coefficients(self) -> tuple[ExactReal, ...]:
        for c in self.coefficients:
            _check_decimal(c)
        return tuple(c.exact() for c in self.coefficients)

    def __call__(self, x) -> ExactReal:
        b3, b2, b1, b0 = self.exact_coefficients
        return ((b3 * x + b2) * x + b1) * x + b0

    def derivative_float(self, x: float) -> float:
        b3, b2, b1, _ = (float(c) for c in self.exact_coefficients)
        return (3 * b3 * x + 2 * b2) * x + b1

    def negated(self) -> "CubicPolynomial":
        from .reals import spec_from_exact

        if any(isinstance(s, DecimalSpec) for s in self.coefficients):
            raise ValueError("cannot negate decimal-coefficient polynomials exactly")
        return CubicPolynomial(*(spec_from_exact(-c) for c in self.exact_coefficients))


@dataclass(frozen=True)
class CubicSystem:
    """H(x) = sum_i h_i(x_i)."""

    polys: tuple[CubicPolynomial, ...]

    def __post_init__(self):
        polys = tuple(self.polys)
        if not polys:
            raise ValueError("a system needs at least one polynomial")
        object.__setattr__(self, "polys", polys)

    @property
    def s(self) -> int:
        return len(self.polys)

    def term(self, i: int, x: int) -> ExactReal:
        return self.polys[i](x)

    def to_json(self) -> dict:
        return {"polys": [[c.encode() for c in p.coefficients] for p in self.polys]}


Form = Union[ShiftedCubeForm, CubicSystem]


@dataclass(frozen=True)
class Window:
    """The open window |value - tau| < eta."""

    tau: ExactReal
    eta: ExactReal

    def __post_init__(self):
        tau = _coerce_real(self.tau)
        eta = _coerce_real(self.eta)
        if eta.sign() <= 0:
            raise ValueError("eta must be positive")
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "eta", eta)

    @property
    def lower(self) -> ExactReal:
        return self.tau - self.eta

    @property
    def upper(self) -> ExactReal:
        return self.tau + self.eta


def _coerce_real(value) -> ExactReal:
    if isinstance(value, str):
        from .reals import parse_exact

        return parse_exact(value)
    return ExactReal.coerce(value)


@dataclass(frozen=True)
class SearchBox:
    """Integer ranges (lo_i, hi_i], half-open on the left."""

    ranges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        ranges = tuple((int(lo), int(hi)) for lo, hi in self.ranges)
        for lo, hi in ranges:
            if not lo < hi:
                raise ValueError(f"empty range ({lo}, {hi}]")
        object.__setattr__(self, "ranges", ranges)

    @classmethod
    def parse(cls, text: str) -> "SearchBox":
        """'lo:hi,lo:hi,...'"""
        try:
            return cls(tuple(tuple(int(v) for v in part.split(":")) for part in text.split(",")))
        except (ValueError, TypeError) as exc:
            raise ParseError(f"malformed box {text!r}: {exc}") from None

    @property
    def s(self) -> int:
        return len(self.ranges)

    @property
    def volume(self) -> int:
        return math.prod(hi - lo for lo, hi in self.ranges)

    def coords(self, i: int) -> range:
        lo, hi = self.ranges[i]
        return range(lo + 1, hi + 1)

    def points(self) -> Iterator[tuple[int, ...]]:
        import itertools

        return itertools.product(*(self.coords(i) for i in range(self.s)))

    def check_for_form(self, form: Form) -> None:
        if self.s != form.s:
            raise DimensionError(f"box has {self.s} ranges, form has {form.s} variables")
        if isinstance(form, ShiftedCubeForm):
            for i, (lo, _) in enumerate(self.ranges):
                if lo < form.floor_shift(i):
                    raise ValueError(
                        f"range {i} starts below floor(mu_{i}) = {form.floor_shift(i)}"
                    )


def eval_form(form: Form, x: Sequence[int]) -> ExactReal:
    """Exact value of F(x) (or H(x) for a CubicSystem)."""
    if len(x) != form.s:
        raise DimensionError(f"expected {form.s} coordinates, got {len(x)}")
    total = ExactReal()
    for i, xi in enumerate(x):
        total = total + form.term(i, int(xi))
    return total


def eval_system(system: CubicSystem, x: Sequence[int]) -> ExactReal:
    return eval_form(system, x)


@dataclass(frozen=True)
class Enclosure:
    """A real known only to lie in [lo, hi]."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("empty enclosure")


def _sign_at(value: ExactReal, bits: int) -> int | None:
    lo, hi = value.enclosure(bits)
    if lo > 0:
        return 1
    if hi < 0:
        return -1
    return None


def in_window(value, w: Window, bits: int = DEFAULT_BITS) -> bool:
    """Strict test |value - tau| < eta.

    Exact inputs are decided first from `bits`-bit enclosures, then from
    ESCALATED_BITS, then exactly. Enclosure inputs raise UndecidableError when
    they straddle a window boundary.
    """
    if isinstance(value, Enclosure):
        lo_w, hi_w = w.lower, w.upper
        if value.lo > lo_w and value.hi < hi_w:
            return True
        if value.hi <= lo_w or value.lo >= hi_w:
            return False
        raise UndecidableError(f"enclosure [{value.lo}, {value.hi}] straddles the window boundary")
    v = ExactReal.coerce(value)
    above = v - w.lower  # must be > 0
    below = w.upper - v  # must be > 0
    for b in (bits, ESCALATED_BITS):
        sa, sb = _sign_at(above, b), _sign_at(below, b)
        if sa is not None and sb is not None:
            return sa > 0 and sb > 0
        if sa == -1 or sb == -1:
            return False
    return above.sign() > 0 and below.sign() > 0


def load_form(source) -> Form:
    """Build a form from a JSON path, JSON text or an already-decoded dict."""
    if isinstance(source, (str, Path)) and Path(source).exists():
        data = json.loads(Path(source).read_text())
    elif isinstance(source, str):
        try:
            data = json.loads(source)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid form JSON: {exc}") from None
    else:
        data = source
    if not isinstance(data, dict):
        raise ParseError("form JSON must be an object")
    if "shifts" in data:
        shifts = data["shifts"]
        if not isinstance(shifts, list) or not shifts:
            raise ParseError("'shifts' must be a nonempty list")
        return ShiftedCubeForm(tuple(parse_real(str_check(m)) for m in shifts))
    if "polys" in data:
        polys = []
        for p in data["polys"]:
            if not isinstance(p, list) or len(p) != 4:
                raise ParseError("each poly must list 4 coefficients [b3, b2, b1, b0]")
            polys.append(CubicPolynomial(*(parse_real(str_check(c)) for c in p)))
        return CubicSystem(tuple(polys))
    raise ParseError("form JSON needs 'shifts' or 'polys'")


def str_check(value) -> str:
    if not isinstance(value, str):
        raise ParseError(f"real literals must be JSON strings, got {value!r}")
    return value
