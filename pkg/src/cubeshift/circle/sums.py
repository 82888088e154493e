"""Exponential sums with cubic phases.

Phases p(x) mod 1 are carried as 128-bit fixed-point integers (two uint64
words). The range is cut into chunks of CHUNK consecutive x; at each chunk
start the forward differences of p are computed exactly in Python integers,
and inside the chunk p(x0 + k) = sum_j D_j * binom(k, j) is evaluated with
wrapping uint64 arithmetic. No phase ever passes through a large float.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from ..core.errors import BudgetExceededError
from ..core.exact import ExactReal
from ..core.forms import CubicPolynomial, _coerce_real

CHUNK = 1024
SUM_LIMIT = 10**7
COMPLETE_LIMIT = 10**6
_FRAC_BITS = 128
_W64 = (1 << 64) - 1
_K = np.arange(CHUNK, dtype=np.uint64)
_BINOMS = [
    np.ones(CHUNK, dtype=np.uint64),
    _K,
    (_K * (_K - np.uint64(1)) // np.uint64(2)) if CHUNK > 1 else _K,
    (_K * (_K - np.uint64(1)) * (_K - np.uint64(2)) // np.uint64(6)),
]
# binom(0,1) etc. wrap for k < j; those entries multiply zero-based k and must vanish
_BINOMS[2][:2] = 0
_BINOMS[3][:3] = 0


def _mulhi64(a: np.ndarray, m: np.ndarray) -> np.ndarray:
    """High 64 bits of a*m for uint64 a and m < 2**31."""
    a_hi = a >> np.uint64(32)
    a_lo = a & np.uint64(0xFFFFFFFF)
    mid = a_hi * m + ((a_lo * m) >> np.uint64(32))
    return mid >> np.uint64(32)


def _phase_words(diffs: Sequence[tuple[int, int]], count: int) -> tuple[np.ndarray, np.ndarray]:
    """(hi, lo) words of sum_j D_j binom(k, j) mod 1 for k < count."""
    hi = np.zeros(count, dtype=np.uint64)
    lo = np.zeros(count, dtype=np.uint64)
    with np.errstate(over="ignore"):
        for j, (d_hi, d_lo) in enumerate(diffs):
            m = _BINOMS[j][:count]
            p_lo = np.uint64(d_lo) * m
            p_hi = np.uint64(d_hi) * m + _mulhi64(np.full(count, d_lo, dtype=np.uint64), m)
            new_lo = lo + p_lo
            carry = (new_lo < lo).astype(np.uint64)
            hi = hi + p_hi + carry
            lo = new_lo
    return hi, lo


def _words_to_turns(hi: np.ndarray, lo: np.ndarray) -> np.ndarray:
    return hi.astype(float) * 2.0**-64 + lo.astype(float) * 2.0**-128


class CubicPhase:
    """p(x) = c3 x^3 + c2 x^2 + c1 x + c0 with exact real coefficients."""

    def __init__(self, coeffs: Sequence, x_max: int):
        self.coeffs = [_coerce_real(c) for c in coeffs]
        mag = max(2, abs(int(x_max)) + 2)
        growth = 3 * math.ceil(math.log2(mag)) + 4
        self.bits = _FRAC_BITS + growth + 16
        self.fixed = [c.enclosure(self.bits)[0] for c in self.coeffs]
        self.error_turns = sum(mag**i for i in range(4)) * 2.0 ** -(self.bits - 1)

    def _value(self, x: int) -> int:
        acc = 0
        for c in reversed(self.fixed):
            acc = acc * x + c
        return acc

    def chunk_diffs(self, x0: int) -> list[tuple[int, int]]:
        vals = [self._value(x0 + i) for i in range(4)]
        diffs = []
        for j in range(4):
            d = vals[0]
            shift = self.bits - _FRAC_BITS
            w = (d >> shift) & ((1 << _FRAC_BITS) - 1)
            diffs.append((w >> 64, w & _W64))
            vals = [vals[i + 1] - vals[i] for i in range(len(vals) - 1)]
        return diffs


def phase_sum(phase: CubicPhase, start: int, stop: int) -> complex:
    """sum over start < x <= stop of e(p(x))."""
    n = stop - start
    if n <= 0:
        return 0j
    if n > SUM_LIMIT:
        raise BudgetExceededError(f"sum of {n} terms exceeds the budget {SUM_LIMIT}")
    re_parts, im_parts = [], []
    x0 = start + 1
    while x0 <= stop:
        count = min(CHUNK, stop - x0 + 1)
        hi, lo = _phase_words(phase.chunk_diffs(x0), count)
        theta = 2 * math.pi * _words_to_turns(hi, lo)
        re_parts.append(np.cos(theta))
        im_parts.append(np.sin(theta))
        x0 += count
    return complex(math.fsum(np.concatenate(re_parts)), math.fsum(np.concatenate(im_parts)))


def _shifted_cube_phase(alpha: ExactReal, mu: ExactReal, x_max: int) -> CubicPhase:
    # alpha*(x - mu)^3 expanded
    return CubicPhase((-alpha * mu**3, 3 * alpha * mu * mu, -3 * alpha * mu, alpha), x_max)


def weyl_sum(j: int, alpha, mu, X) -> complex:
    """f_j(alpha, mu, X) = sum over (j-1)X < x <= jX of e(alpha (x - mu)^3)."""
    if j not in (1, 2):
        raise ValueError("j must be 1 or 2")
    alpha, mu, X = _coerce_real(alpha), _coerce_real(mu), _coerce_real(X)
    if X.sign() <= 0:
        raise ValueError("X must be positive")
    lo = ((j - 1) * X).floor()
    hi = (j * X).floor()
    phase = _shifted_cube_phase(alpha, mu, hi + abs(mu.floor()))
    return phase_sum(phase, lo, hi)


def weyl_sum_terms(j: int, X) -> int:
    X = _coerce_real(X)
    return (j * X).floor() - ((j - 1) * X).floor()


def differenced_weyl_sum(h: CubicPolynomial, alpha, hstep: int, P, c=2) -> complex:
    """Phi_h(alpha) = sum over P < x <= cP of e(alpha (h(x + hstep) - h(x)))."""
    if not isinstance(hstep, int) or hstep < 1:
        raise ValueError("hstep must be a positive integer")
    alpha, P, c = _coerce_real(alpha), _coerce_real(P), _coerce_real(c)
    b3, b2, b1, _ = h.exact_coefficients
    k = hstep
    # h(x+k) - h(x) = 3 b3 k x^2 + (3 b3 k^2 + 2 b2 k) x + (b3 k^3 + b2 k^2 + b1 k)
    coeffs = (
        alpha * (b3 * k**3 + b2 * k * k + b1 * k),
        alpha * (3 * b3 * k * k + 2 * b2 * k),
        alpha * (3 * b3 * k),
        ExactReal(),
    )
    lo, hi = P.floor(), (c * P).floor()
    return phase_sum(CubicPhase(coeffs, hi + k), lo, hi)


def differenced_aggregate(h: CubicPolynomial, alpha, H: int, P, c=2) -> complex:
    """G(alpha) = sum over 0 < hstep <= H of Phi_hstep(alpha)."""
    return sum((differenced_weyl_sum(h, alpha, k, P, c) for k in range(1, H + 1)), 0j)


def complete_exp_sum(q: int, v: Sequence[int]) -> complex:
    """S(q, v) = sum over 1 <= x <= q of e((v3 x^3 + v2 x^2 + v1 x) / q)."""
    if not isinstance(q, int) or q < 1:
        raise ValueError("q must be a positive integer")
    if q > COMPLETE_LIMIT:
        raise BudgetExceededError(f"q = {q} exceeds the budget {COMPLETE_LIMIT}")
    v3, v2, v1 = (int(c) % q for c in v)
    x = np.arange(1, q + 1, dtype=np.int64) % q
    r = (v3 * x) % q
    r = ((r + v2) * x) % q
    r = ((r + v1) * x) % q
    theta = 2 * math.pi * (r.astype(float) / q)
    return complex(math.fsum(np.cos(theta)), math.fsum(np.sin(theta)))


def fast_shifted_weyl(alphas: np.ndarray, mu, X: int) -> tuple[np.ndarray, float]:
    """f_1(alpha, mu, X) for many float alphas at once, plus a per-value error bound.

    Meant for quadrature nodes with moderate |alpha| * X^3; phases use the
    float cubes (x - mu)^3, whose rounding is accounted in the returned bound.
    """
    mu = _coerce_real(mu)
    cubes = [(x - mu) ** 3 for x in range(1, int(X) + 1)]
    t = np.array([float(c) for c in cubes])
    phases = np.multiply.outer(alphas, t)
    vals = np.exp(2j * math.pi * np.mod(phases, 1.0)).sum(axis=-1)
    amax = float(np.abs(alphas).max(initial=0.0))
    tmax = float(np.abs(t).max(initial=0.0))
    err = len(t) * 2 * math.pi * (amax * tmax * 2.0**-51 + 2.0**-50)
    return vals, err
