"""Measure of the represented and unrepresented sets Z(A, B).

For every admissible x the window (F(x) - eta, F(x) + eta) is represented;
Z(A, B) is what [A, B] loses to their union. The union is computed from
fixed-point centres with `bits` fractional bits, stored as 32-bit limbs in
int64 arrays so sorting and gap tests stay vectorised. Every endpoint is off
by at most a few units in the last place, which yields a certified error bar
on the measure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .core import BudgetExceededError, ExactReal, ShiftedCubeForm
from .core.forms import _coerce_real
from .solver import derived_box

DEFAULT_BITS = 192
BOX_LIMIT = 10**8
POINT_LIMIT = 8_000_000
LIMB = 32
_MASK = (1 << LIMB) - 1


def _n_limbs(bits: int, int_bits: int) -> int:
    return (bits + int_bits + 8) // LIMB + 1


def _to_limbs(values: Sequence[int], n: int) -> np.ndarray:
    out = np.zeros((len(values), n), dtype=np.int64)
    for r, v in enumerate(values):
        if v < 0:
            raise ValueError("limb encoding needs nonnegative values")
        for k in range(n):
            out[r, k] = v & _MASK
            v >>= LIMB
        if v:
            raise OverflowError("value too large for limb count")
    return out


def _normalize(limbs: np.ndarray) -> np.ndarray:
    for k in range(limbs.shape[1] - 1):
        carry = limbs[:, k] >> LIMB
        limbs[:, k] &= _MASK
        limbs[:, k + 1] += carry
    return limbs


def _from_limbs(limbs: np.ndarray) -> list[int]:
    acc = np.zeros(limbs.shape[0], dtype=object)
    for k in range(limbs.shape[1] - 1, -1, -1):
        acc = (acc * (1 << LIMB)) + limbs[:, k].astype(object)
    return [int(v) for v in acc]


def _less_than(limbs: np.ndarray, bound: np.ndarray) -> np.ndarray:
    """Row-wise limbs < bound for normalised nonnegative limb rows."""
    result = np.zeros(limbs.shape[0], dtype=bool)
    undecided = np.ones(limbs.shape[0], dtype=bool)
    for k in range(limbs.shape[1] - 1, -1, -1):
        col = limbs[:, k]
        result |= undecided & (col < bound[k])
        undecided &= col == bound[k]
    return result


@dataclass(frozen=True)
class IntervalSet:
    """Sorted disjoint open intervals, endpoints stored as ints scaled by 2**bits.

    `error` bounds |measure - true measure| for sets computed from approximate
    endpoints; it is zero for sets built from exact dyadic data.
    """

    starts: tuple[int, ...]
    ends: tuple[int, ...]
    bits: int = DEFAULT_BITS
    error: Fraction = Fraction(0)
    n_source: int = field(default=0, compare=False)

    @classmethod
    def from_intervals(cls, intervals, bits: int = DEFAULT_BITS) -> "IntervalSet":
        """Canonical union of arbitrary (a, b) pairs; endpoints rounded to 2**-bits."""
        scaled = []
        err = Fraction(0)
        for a, b in intervals:
            ea, eb = _coerce_real(a), _coerce_real(b)
            lo, hi = ea.enclosure(bits)[0], eb.enclosure(bits)[0]
            if not (ea.is_rational() and (ea * (1 << bits)).is_rational()
                    and (ea * (1 << bits)).as_fraction().denominator == 1):
                err += Fraction(1, 1 << bits)
            if not (eb.is_rational() and (eb * (1 << bits)).as_fraction().denominator == 1):
                err += Fraction(1, 1 << bits)
            if lo < hi:
                scaled.append((lo, hi))
        return cls._merge(scaled, bits, err)

    @classmethod
    def _merge(cls, pairs, bits, err) -> "IntervalSet":
        pairs = sorted(pairs)
        starts, ends = [], []
        for a, b in pairs:
            if starts and a < ends[-1]:
                if b > ends[-1]:
                    ends[-1] = b
            else:
                starts.append(a)
                ends.append(b)
        return cls(tuple(starts), tuple(ends), bits, err, len(pairs))

    def union(self, other: "IntervalSet") -> "IntervalSet":
        if other.bits != self.bits:
            raise ValueError("cannot merge sets with different scales")
        pairs = list(zip(self.starts, self.ends)) + list(zip(other.starts, other.ends))
        return IntervalSet._merge(pairs, self.bits, self.error + other.error)

    def clip(self, A, B) -> "IntervalSet":
        a = _coerce_real(A).enclosure(self.bits)[1]
        b = _coerce_real(B).enclosure(self.bits)[0]
        pairs = [(max(s, a), min(e, b)) for s, e in zip(self.starts, self.ends) if e > a and s < b]
        extra = Fraction(2, 1 << self.bits)
        return IntervalSet(tuple(p[0] for p in pairs), tuple(p[1] for p in pairs),
                           self.bits, self.error + extra, self.n_source)

    def __len__(self) -> int:
        return len(self.starts)

    @property
    def intervals(self) -> list[tuple[Fraction, Fraction]]:
        d = 1 << self.bits
        return [(Fraction(s, d), Fraction(e, d)) for s, e in zip(self.starts, self.ends)]

    def measure(self) -> Fraction:
        return Fraction(sum(self.ends) - sum(self.starts), 1 << self.bits)

    def measure_below(self, t) -> Fraction:
        """Measure of the part of the set lying in (-inf, t]."""
        cut = _coerce_real(t).enclosure(self.bits)[0]
        total = sum(min(e, cut) - s for s, e in zip(self.starts, self.ends) if s < cut)
        return Fraction(total, 1 << self.bits)

    def contains(self, t) -> bool:
        v = _coerce_real(t) * (1 << self.bits)
        import bisect

        i = bisect.bisect_right(self.starts, v.floor()) - 1
        return i >= 0 and v > self.starts[i] and v < self.ends[i]


@dataclass(frozen=True)
class CertifiedMeasure:
    value: Fraction
    error: Fraction

    def __float__(self) -> float:
        return float(self.value)

    @property
    def lower(self) -> Fraction:
        return self.value - self.error

    @property
    def upper(self) -> Fraction:
        return self.value + self.error


def _enumerate_centres(form: ShiftedCubeForm, limit: ExactReal, max_points: int):
    """Index arrays of all x in the derived box with F(x) below `limit` (float filter)."""
    box = derived_box(form, limit)
    if box is None:
        return None, [], None
    if box.volume > BOX_LIMIT:
        raise BudgetExceededError(f"enumeration box has {box.volume} points, limit {BOX_LIMIT}")
    coords = [list(box.coords(i)) for i in range(form.s)]
    values = [[form.term(i, x) for x in coords[i]] for i in range(form.s)]
    floats = [np.array([float(v) for v in vals]) for vals in values]
    lim = float(limit) * (1 + 1e-12) + 1e-9

    partial = np.zeros(1)
    idx: list[np.ndarray] = []
    for i, f in enumerate(floats):
        counts = np.searchsorted(f, lim - partial, side="right")
        total = int(counts.sum())
        if total > max_points:
            raise BudgetExceededError(f"{total} windows exceed the point budget {max_points}")
        owner = np.repeat(np.arange(partial.size), counts)
        pos = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
        idx = [a[owner] for a in idx] + [pos]
        partial = partial[owner] + f[pos]
    return (coords, values), idx, partial


def represented_set(form: ShiftedCubeForm, A, B, eta, bits: int = DEFAULT_BITS,
                    max_points: int = POINT_LIMIT) -> IntervalSet:
    """Union of the windows (F(x) - eta, F(x) + eta) over admissible x, clipped to [A, B]."""
    A, B, eta = _coerce_real(A), _coerce_real(B), _coerce_real(eta)
    if not A < B:
        raise ValueError("need A < B")
    if eta.sign() <= 0:
        raise ValueError("eta must be positive")
    data, idx, approx = _enumerate_centres(form, B + eta, max_points)
    if data is None or not idx or idx[0].size == 0:
        return IntervalSet((), (), bits)
    _, values = data
    s = form.s

    int_bits = max(8, math.ceil(math.log2(float(B + eta) + 2)) + 2)
    n = _n_limbs(bits, int_bits)
    tables = []
    slack = 0
    for vals in values:
        encl = [v.enclosure(bits) for v in vals]
        slack = max(slack, max(hi - lo for lo, hi in encl))
        tables.append(_to_limbs([lo for lo, _ in encl], n))
    # presort by the float centres, then confirm the order exactly
    order = np.argsort(approx, kind="stable")
    centres = np.zeros((idx[0].size, n), dtype=np.int64)
    for t, j in zip(tables, idx):
        centres += t[j[order]]
    _normalize(centres)
    gaps = centres[1:] - centres[:-1]
    _normalize(gaps)
    if (gaps[:, -1] < 0).any():
        packed = centres[:, 0::2] | (centres[:, 1::2] << LIMB) if n % 2 == 0 else None
        keys = packed.view(np.uint64).T if packed is not None else centres.T
        centres = centres[np.lexsort(keys)]
        gaps = centres[1:] - centres[:-1]
        _normalize(gaps)

    e_lo, e_hi = eta.enclosure(bits)
    width = _to_limbs([2 * e_lo], n)[0]
    overlap = _less_than(gaps, width)
    breaks = np.flatnonzero(~overlap)
    first = np.concatenate([[0], breaks + 1])
    last = np.concatenate([breaks, [centres.shape[0] - 1]])
    starts = [c - e_lo for c in _from_limbs(centres[first])]
    ends = [c + e_lo for c in _from_limbs(centres[last])]

    # each endpoint is within s*slack + (e_hi - e_lo) + 1 ulps of the truth
    per_endpoint = s * slack + (e_hi - e_lo) + 1
    err = Fraction(2 * centres.shape[0] * per_endpoint, 1 << bits)
    full = IntervalSet(tuple(starts), tuple(ends), bits, err, centres.shape[0])
    return full.clip(A, B)


def unrepresented_measure(form: ShiftedCubeForm, A, B, eta, **kwargs) -> CertifiedMeasure:
    """(B - A) minus the measure of the represented set, with its error bar."""
    rep = represented_set(form, A, B, eta, **kwargs)
    total = _coerce_real(B) - _coerce_real(A)
    length = total.as_fraction() if total.is_rational() else Fraction(float(total))
    err = rep.error + (Fraction(0) if total.is_rational() else Fraction(1, 1 << 50))
    return CertifiedMeasure(length - rep.measure(), err)


def cube_sum_volume(s: int = 3) -> float:
    """Volume of {g in R_{>0}^s : sum g_i^3 < 1} = Gamma(4/3)^s / Gamma(s/3 + 1)."""
    return math.gamma(4 / 3) ** s / math.gamma(s / 3 + 1)


def cube_sum_volume_mc(s: int = 3, samples: int = 2_000_000, seed: int = 0) -> tuple[float, float]:
    """Monte Carlo estimate over [0, 1]^s and its standard error."""
    rng = np.random.default_rng(seed)
    hits = 0
    done = 0
    while done < samples:
        n = min(1_000_000, samples - done)
        pts = rng.random((n, s))
        hits += int(((pts**3).sum(axis=1) < 1).sum())
        done += n
    p = hits / samples
    return p, math.sqrt(p * (1 - p) / samples)


def volume_bound_theorem4(eta, N) -> float:
    """2 eta (N + 10 N^(2/3)) times the volume of the positive unit cube-sum ball."""
    eta, N = float(eta), float(N)
    if eta < 0 or N <= 0:
        raise ValueError("need eta >= 0 and N > 0")
    return 2 * eta * (N + 10 * N ** (2 / 3)) * cube_sum_volume(3)


@dataclass(frozen=True)
class DensityProfile:
    rows: list[tuple[Fraction, Fraction]]  # (N_k, meas(Z(N_k)) / N_k)
    errors: list[Fraction]
    N: Fraction
    truncated: bool
    represented: IntervalSet = field(repr=False)


def density_profile(form: ShiftedCubeForm, N, eta, num_prefixes: int, ratio: int = 2,
                    max_points: int = POINT_LIMIT) -> DensityProfile:
    """Unrepresented fraction meas(Z(N_k))/N_k at N_k = N / ratio^(K-1-k).

    If enumeration at scale N exceeds the point budget, N is reduced until it
    fits and the profile is flagged as truncated.
    """
    N = Fraction(_coerce_real(N).as_fraction())
    if num_prefixes < 1:
        raise ValueError("need at least one prefix")
    truncated = False
    while True:
        try:
            rep = represented_set(form, 0, N, eta, max_points=max_points)
            break
        except BudgetExceededError:
            truncated = True
            # lattice points with F <= N number about V_s * N^(s/3)
            fit = (max_points / (1.25 * cube_sum_volume(form.s))) ** (3 / form.s)
            N = min(N * Fraction(3, 4), Fraction(int(fit)))
            if N < 1:
                raise
    rows, errors = [], []
    for k in range(num_prefixes):
        Nk = N / ratio ** (num_prefixes - 1 - k)
        z = Nk - rep.measure_below(Nk)
        rows.append((Nk, z / Nk))
        errors.append(rep.error / Nk)
    return DensityProfile(rows, errors, N, truncated, rep)
