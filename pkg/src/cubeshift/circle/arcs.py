"""Arc dissections and rational approximation by continued fractions."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from ..core.exact import ExactReal, continued_fraction
from ..core.forms import _coerce_real

MAJOR, MINOR, TRIVIAL = "major", "minor", "trivial"


@dataclass(frozen=True)
class ArcParams:
    """Major arc |alpha| <= P^(xi-3), minor arc up to T, trivial arc beyond T.

    T defaults to log P; it only needs to grow slowly with P.
    """

    P: float
    xi: float = 0.5
    T: float | None = None

    def __post_init__(self):
        if not self.P > 1:
            raise ValueError("P must exceed 1")
        if not 0 < self.xi < 1:
            raise ValueError("xi must lie in (0, 1)")
        if self.T is None:
            object.__setattr__(self, "T", math.log(self.P))
        if not self.T >= 1:
            raise ValueError(f"T = {self.T:.4g} must be at least 1 (log P < 1 needs an explicit T)")

    @property
    def major_radius(self) -> float:
        return self.P ** (self.xi - 3)


def classify_arc(alpha, arcs: ArcParams) -> str:
    a = abs(float(alpha))
    if a <= arcs.major_radius:
        return MAJOR
    if a <= arcs.T:
        return MINOR
    return TRIVIAL


@dataclass(frozen=True)
class RationalApprox:
    a: int
    q: int
    err: float  # |q*alpha - a|


def convergents(alpha) -> Iterator[tuple[int, int]]:
    """(p_k, q_k) for the continued-fraction convergents of an exact real."""
    p0, q0, p1, q1 = 1, 0, 0, 1
    for a in continued_fraction(_coerce_real(alpha)):
        p0, q0, p1, q1 = a * p0 + p1, a * q0 + q1, p0, q0
        yield p0, q0


def _exact_alpha(alpha) -> ExactReal:
    if isinstance(alpha, float):
        if not math.isfinite(alpha):
            raise ValueError("alpha must be finite")
        return ExactReal.rational(Fraction(alpha))
    return _coerce_real(alpha)


def dirichlet_approx(alpha, Q) -> RationalApprox:
    """Coprime a/q with q <= Q and |q alpha - a| <= 1/Q, taken from the convergents.

    Float inputs are treated as the exact binary rationals they denote.
    """
    Q = Fraction(_coerce_real(Q).as_fraction()) if not isinstance(Q, float) else Fraction(Q)
    if Q < 1:
        raise ValueError("Q must be at least 1")
    x = _exact_alpha(alpha)
    best = None
    for p, q in convergents(x):
        if q > Q:
            break
        best = (p, q)
    a, q = best
    return RationalApprox(a, q, float(abs(q * x - a)))


@dataclass(frozen=True)
class ClassicalMembership:
    """Membership in the classical major arcs: |q alpha - a| <= P^(-3/2), q <= P."""

    in_major: bool
    q: int | None = None
    a: int | None = None
    err: float | None = None


def classify_classical(alpha, P) -> ClassicalMembership:
    """Witness with the smallest q, or membership in the complement.

    A smallest q with |q alpha - a| <= eps is a best approximation, hence a
    convergent, so scanning convergents with q <= P is complete.
    """
    P = Fraction(P) if isinstance(P, (int, float)) else _coerce_real(P).as_fraction()
    if not P > 1:
        raise ValueError("P must exceed 1")
    x = _exact_alpha(alpha)
    bound_sq = 1 / P**3  # compare squares to stay rational
    # the nearest-integer candidate at q = 1 is covered by the convergent sequence
    candidates = [(x.floor(), 1), (x.ceil(), 1)]
    for p, q in convergents(x):
        if q > P:
            break
        candidates.append((p, q))
    for p, q in sorted(candidates, key=lambda c: c[1]):
        if q > P:
            continue
        d = q * x - p
        if (d * d) <= bound_sq and math.gcd(p, q) == 1:
            return ClassicalMembership(True, q, p, float(abs(d)))
    return ClassicalMembership(False)
