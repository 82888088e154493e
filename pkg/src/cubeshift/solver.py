"""Finding and counting integer solutions of |F(x) - tau| < eta.

Three routes share one contract:

* ``brute_force_solve`` walks the whole box and decides every point from
  192-bit enclosures (falling back to exact arithmetic). It is the oracle.
* ``mitm_solve`` splits the variables in two halves, sorts the partial sums
  of the second half and binary-searches the window for every partial sum of
  the first. Floats are only used to locate candidates; anything within the
  rounding margin of a window edge is re-decided exactly.
* ``histogram_count`` bins each variable's values and convolves the
  histograms, producing a certified bracket instead of an exact count.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.signal import fftconvolve

from .core import (
    BudgetExceededError,
    CubicPolynomial,
    ExactReal,
    SearchBox,
    ShiftedCubeForm,
    Window,
    eval_form,
)
from .core.forms import DEFAULT_BITS, ESCALATED_BITS, Form, _as_spec, _coerce_real

BRUTE_FORCE_LIMIT = 10**8
DEFAULT_MAX_BINS = 2**26


def default_table_limit() -> int:
    """Partial-sum table entries allowed per half, from CUBESHIFT_MEM_MB."""
    mem_mb = int(os.environ.get("CUBESHIFT_MEM_MB", "1024"))
    return max(1, mem_mb * 2**20 // 48)


@dataclass(frozen=True)
class SolutionRecord:
    x: tuple[int, ...]
    value: ExactReal
    deviation: ExactReal


@dataclass(frozen=True)
class CountBracket:
    lower: int
    upper: int
    bin_width: Fraction
    estimate: float | None = None

    def __post_init__(self):
        if not 0 <= self.lower <= self.upper:
            raise ValueError(f"invalid bracket [{self.lower}, {self.upper}]")

    @property
    def width(self) -> int:
        return self.upper - self.lower

    def __contains__(self, n: int) -> bool:
        return self.lower <= n <= self.upper


class TermTable:
    """The values of one summand over its integer domain."""

    def __init__(self, xs: Sequence[int], values: Sequence[ExactReal]):
        self.xs = np.asarray(list(xs), dtype=np.int64)
        self.exact = list(values)
        self.floats = np.array([float(v) for v in self.exact], dtype=np.float64)
        self._enclosures: dict[int, tuple[list[int], list[int]]] = {}

    @classmethod
    def for_term(cls, fn, xs: Sequence[int], sign: int = 1) -> "TermTable":
        xs = list(xs)
        vals = [fn(x) for x in xs]
        if sign < 0:
            vals = [-v for v in vals]
        return cls(xs, vals)

    def __len__(self) -> int:
        return len(self.exact)

    def enclosures(self, bits: int) -> tuple[list[int], list[int]]:
        if bits not in self._enclosures:
            pairs = [v.enclosure(bits) for v in self.exact]
            self._enclosures[bits] = ([p[0] for p in pairs], [p[1] for p in pairs])
        return self._enclosures[bits]


def _tables_for_box(form: Form, box: SearchBox) -> list[TermTable]:
    box.check_for_form(form)
    return [TermTable.for_term(lambda x, i=i: form.term(i, x), box.coords(i)) for i in range(form.s)]


class _Decider:
    """Decides lower < sum < upper for index tuples, cheapest precision first."""

    def __init__(self, tables: list[TermTable], lower: ExactReal, upper: ExactReal):
        self.tables = tables
        self.lower = lower
        self.upper = upper
        self._bounds = {b: (lower.enclosure(b), upper.enclosure(b)) for b in (DEFAULT_BITS, ESCALATED_BITS)}

    def inside(self, idx: Sequence[int]) -> bool:
        for bits in (DEFAULT_BITS, ESCALATED_BITS):
            (llo, lhi), (ulo, uhi) = self._bounds[bits]
            lo = hi = 0
            for t, j in zip(self.tables, idx):
                los, his = t.enclosures(bits)
                lo += los[j]
                hi += his[j]
            if lo > lhi and hi < ulo:
                return True
            if hi <= llo or lo >= uhi:
                return False
        total = ExactReal()
        for t, j in zip(self.tables, idx):
            total = total + t.exact[j]
        return total > self.lower and total < self.upper


def _check_volume(tables: list[TermTable], limit: int) -> None:
    vol = math.prod(len(t) for t in tables)
    if vol > limit:
        raise BudgetExceededError(f"box has {vol} points, limit is {limit}")


def brute_force_solve(form: Form, w: Window, box: SearchBox) -> list[SolutionRecord]:
    """Exhaustive, lexicographically sorted list of all solutions in the box."""
    tables = _tables_for_box(form, box)
    _check_volume(tables, BRUTE_FORCE_LIMIT)
    decider = _Decider(tables, w.lower, w.upper)
    import itertools

    out = []
    for idx in itertools.product(*(range(len(t)) for t in tables)):
        if decider.inside(idx):
            x = tuple(int(t.xs[j]) for t, j in zip(tables, idx))
            out.append(_record(form, x, w))
    return out


def _record(form: Form, x: tuple[int, ...], w: Window) -> SolutionRecord:
    value = eval_form(form, x)
    return SolutionRecord(x, value, abs(value - w.tau))


def _half_sums(tables: list[TermTable]) -> np.ndarray:
    """Float partial sums over the product of the tables, in lexicographic order."""
    total = np.zeros(1)
    for t in tables:
        total = (total[:, None] + t.floats[None, :]).ravel()
    return total


def _unravel(flat: np.ndarray, tables: list[TermTable]) -> list[np.ndarray]:
    if not tables:
        return []
    return list(np.unravel_index(flat, tuple(len(t) for t in tables)))


def _expand_ranges(starts: np.ndarray, stops: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(owner, position) pairs for the union of [starts[i], stops[i])."""
    lengths = np.maximum(stops - starts, 0)
    owner = np.repeat(np.arange(len(starts)), lengths)
    if owner.size == 0:
        return owner, owner
    offsets = np.arange(owner.size) - np.repeat(np.cumsum(lengths) - lengths, lengths)
    return owner, starts[owner] + offsets


def _mitm(tables: list[TermTable], lower: ExactReal, upper: ExactReal,
          enumerate_: bool, max_table: int | None = None):
    """Count (or list index tuples of) the tuples with lower < sum < upper."""
    limit = max_table or default_table_limit()
    k = (len(tables) + 1) // 2
    ta, tb = tables[:k], tables[k:]
    for half in (ta, tb):
        size = math.prod(len(t) for t in half)
        if size > limit:
            raise BudgetExceededError(f"partial-sum table of {size} entries exceeds limit {limit}")
    sa = _half_sums(ta)
    sb = _half_sums(tb)
    order = np.argsort(sb, kind="stable")
    sbs = sb[order]

    lo_f, hi_f = float(lower), float(upper)
    scale = sum(float(np.abs(t.floats).max()) for t in tables) + abs(lo_f) + abs(hi_f) + 1.0
    margin = scale * (len(tables) + 4) * 2.0**-50

    t1 = lo_f - sa
    t2 = hi_f - sa
    lo_wide = np.searchsorted(sbs, t1 - margin, side="left")
    lo_in = np.searchsorted(sbs, t1 + margin, side="right")
    hi_in = np.searchsorted(sbs, t2 - margin, side="left")
    hi_wide = np.searchsorted(sbs, t2 + margin, side="right")

    sure = hi_in > lo_in
    cand_parts = [
        _expand_ranges(lo_wide[sure], lo_in[sure]),
        _expand_ranges(hi_in[sure], hi_wide[sure]),
        _expand_ranges(lo_wide[~sure], hi_wide[~sure]),
    ]
    sure_idx = np.flatnonzero(sure)
    not_sure_idx = np.flatnonzero(~sure)
    owners_map = [sure_idx, sure_idx, not_sure_idx]

    decider = _Decider(tables, lower, upper)
    cand_a, cand_b = [], []
    for (owner, pos), amap in zip(cand_parts, owners_map):
        if owner.size == 0:
            continue
        a_flat = amap[owner]
        b_flat = order[pos]
        a_idx = _unravel(a_flat, ta)
        b_idx = _unravel(b_flat, tb)
        for n in range(owner.size):
            idx = [int(v[n]) for v in a_idx] + [int(v[n]) for v in b_idx]
            if decider.inside(idx):
                cand_a.append(int(a_flat[n]))
                cand_b.append(int(b_flat[n]))

    if not enumerate_:
        return int((hi_in[sure] - lo_in[sure]).sum()) + len(cand_a)

    owner, pos = _expand_ranges(lo_in[sure], hi_in[sure])
    a_flat = np.concatenate([sure_idx[owner], np.asarray(cand_a, dtype=np.int64)])
    b_flat = np.concatenate([order[pos], np.asarray(cand_b, dtype=np.int64)])
    return _unravel(a_flat, ta) + _unravel(b_flat, tb)


def _sorted_points(tables: list[TermTable], idx: list[np.ndarray]) -> list[tuple[int, ...]]:
    if not idx or idx[0].size == 0:
        return []
    cols = [t.xs[j] for t, j in zip(tables, idx)]
    order = np.lexsort(cols[::-1])
    return [tuple(int(c[n]) for c in cols) for n in order]


def mitm_solve(form: Form, w: Window, box: SearchBox, emit: str = "count",
               max_table: int | None = None):
    """Meet-in-the-middle count or enumeration of the solutions in the box.

    emit="count" returns an int; emit="enumerate" returns the same sorted
    SolutionRecord list as brute_force_solve.
    """
    if emit not in ("count", "enumerate"):
        raise ValueError(f"emit must be 'count' or 'enumerate', got {emit!r}")
    tables = _tables_for_box(form, box)
    if form.s == 1:
        decider = _Decider(tables, w.lower, w.upper)
        hits = [int(x) for j, x in enumerate(tables[0].xs) if decider.inside([j])]
        if emit == "count":
            return len(hits)
        return [_record(form, (x,), w) for x in hits]
    result = _mitm(tables, w.lower, w.upper, emit == "enumerate", max_table)
    if emit == "count":
        return result
    return [_record(form, x, w) for x in _sorted_points(tables, result)]


def derived_box(form: ShiftedCubeForm, upper: ExactReal) -> SearchBox | None:
    """Box holding every x with x_i > mu_i and F(x) < upper.

    Each coordinate satisfies (x_i - mu_i)**3 < upper, so
    x_i <= mu_i + upper**(1/3) + 1 is a safe crude bound. Returns None when
    some coordinate range is empty.
    """
    up = float(upper)
    if up <= 0:
        return None
    root = up ** (1.0 / 3.0)
    ranges = []
    for i in range(form.s):
        lo = form.floor_shift(i)
        hi = math.floor(float(form.exact_shifts[i]) + root) + 1
        if hi <= lo:
            return None
        ranges.append((lo, hi))
    return SearchBox(tuple(ranges))


def count_window(form: ShiftedCubeForm, w: Window, max_table: int | None = None) -> int:
    """N(tau): the number of x with x_i > mu_i and |F(x) - tau| < eta."""
    if w.tau.sign() <= 0:
        raise ValueError("count_window needs tau > 0")
    box = derived_box(form, w.upper)
    if box is None:
        return 0
    return mitm_solve(form, w, box, "count", max_table)


# -- histogram bracket ------------------------------------------------------

def _sparse_hist(keys: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    idx, cnt = np.unique(keys, return_counts=True)
    return idx.astype(np.int64), cnt.astype(np.int64)


def _combine(h1, h2, kmax: int, max_bins: int):
    """Truncated convolution of two sparse histograms (index, count)."""
    i1, c1 = h1
    i2, c2 = h2
    work = i1.size * i2.size
    if work <= 4_000_000:
        keys = (i1[:, None] + i2[None, :]).ravel()
        weights = (c1[:, None] * c2[None, :]).ravel()
        keep = keys <= kmax
        keys, weights = keys[keep], weights[keep]
        uniq, inv = np.unique(keys, return_inverse=True)
        counts = np.zeros(uniq.size, dtype=np.int64)
        np.add.at(counts, inv, weights)
        return uniq, counts
    if kmax + 1 > max_bins:
        raise BudgetExceededError(f"{kmax + 1} bins exceed the budget of {max_bins}")
    fft_cost = 6 * (kmax + 1) * max(1, math.ceil(math.log2(kmax + 1)))
    dense = None
    if fft_cost < work:
        d1 = np.zeros(kmax + 1)
        d2 = np.zeros(kmax + 1)
        d1[i1[i1 <= kmax]] = c1[i1 <= kmax]
        d2[i2[i2 <= kmax]] = c2[i2 <= kmax]
        # float64 FFT error is below 1/4 when this bound holds, so rounding is exact
        err = 1e-15 * math.log2(2 * kmax + 2) * float(np.linalg.norm(d1) * np.linalg.norm(d2))
        if err < 0.25:
            dense = np.rint(fftconvolve(d1, d2)[: kmax + 1]).astype(np.int64)
    if dense is None:
        dense = np.zeros(kmax + 1, dtype=np.int64)
        chunk = max(1, 2_000_000 // max(1, i2.size))
        for start in range(0, i1.size, chunk):
            keys = (i1[start:start + chunk, None] + i2[None, :]).ravel()
            weights = (c1[start:start + chunk, None] * c2[None, :]).ravel()
            keep = keys <= kmax
            np.add.at(dense, keys[keep], weights[keep])
    nz = np.flatnonzero(dense)
    return nz.astype(np.int64), dense[nz]


def _combine_all(hists, kmax, max_bins):
    acc = hists[0]
    acc = (acc[0][acc[0] <= kmax], acc[1][acc[0] <= kmax])
    for h in hists[1:]:
        acc = _combine(acc, h, kmax, max_bins)
    return acc


def histogram_count(form: ShiftedCubeForm, w: Window, bin_width,
                    max_bins: int = DEFAULT_MAX_BINS) -> CountBracket:
    """Certified bracket lower <= N(tau) <= upper from binned convolution.

    Each value t = (x_i - mu_i)**3 sits in bin k = floor(t / bin_width), so a
    tuple with bin-index sum K has F(x) in [K*w, (K + s)*w). Tuples whose whole
    cell lies inside the window count toward `lower`; tuples whose cell meets
    the window count toward `upper`.
    """
    width = _coerce_real(bin_width)
    if not width.is_rational() or width.sign() <= 0:
        raise ValueError("bin_width must be a positive rational")
    width_q = width.as_fraction()
    if width > w.eta / 4:
        raise ValueError("bin_width must be at most eta/4")
    if w.tau.sign() <= 0:
        raise ValueError("histogram_count needs tau > 0")
    s = form.s
    box = derived_box(form, w.upper)
    if box is None:
        return CountBracket(0, 0, width_q)
    inv_w = 1 / width_q
    kmax = (w.upper * inv_w).ceil()
    if kmax + 1 > max_bins:
        raise BudgetExceededError(f"{kmax + 1} bins exceed the budget of {max_bins}")
    hists = []
    for i in range(s):
        keys = np.array([(form.term(i, x) * inv_w).floor() for x in box.coords(i)], dtype=np.int64)
        hists.append(_sparse_hist(keys[keys <= kmax]))
        if hists[-1][0].size == 0:
            return CountBracket(0, 0, width_q)

    lo_scaled = w.lower * inv_w
    hi_scaled = w.upper * inv_w
    lower_range = (lo_scaled.floor() + 1, hi_scaled.floor() - s)
    upper_range = (lo_scaled.floor() - s + 1, hi_scaled.ceil() - 1)

    if s == 1:
        counts = dict(zip(hists[0][0].tolist(), hists[0][1].tolist()))
        def window_mass(a, b):
            return sum(c for k, c in counts.items() if a <= k <= b)
        def cell_count(K):
            return counts.get(K, 0)
    else:
        k = (s + 1) // 2
        ha = _combine_all(hists[:k], kmax, max_bins)
        hb = _combine_all(hists[k:], kmax, max_bins)
        dense_b = np.zeros(kmax + 1, dtype=np.int64)
        dense_b[hb[0]] = hb[1]
        prefix = np.concatenate([[0], np.cumsum(dense_b)])  # prefix[n+1] = sum_{k<=n}

        def window_mass(a, b):
            if b < a:
                return 0
            hi_idx = np.clip(b - ha[0], -1, kmax) + 1
            lo_idx = np.clip(a - 1 - ha[0], -1, kmax) + 1
            return int((ha[1] * (prefix[hi_idx] - prefix[lo_idx])).sum())

        def cell_count(K):
            j = K - ha[0]
            ok = (j >= 0) & (j <= kmax)
            return int((ha[1][ok] * dense_b[j[ok]]).sum())

    lower = window_mass(*lower_range)
    upper = window_mass(max(upper_range[0], 0), upper_range[1])
    # point estimate: offsets within bins taken as independent uniforms
    a_pos, b_pos = float(lo_scaled), float(hi_scaled)
    estimate = float(lower)
    for K in range(max(upper_range[0], 0), upper_range[1] + 1):
        if lower_range[0] <= K <= lower_range[1]:
            continue
        p = irwin_hall_cdf(b_pos - K, s) - irwin_hall_cdf(a_pos - K, s)
        if p > 0:
            estimate += p * cell_count(K)
    return CountBracket(lower, upper, width_q, estimate)


def irwin_hall_cdf(x: float, n: int) -> float:
    """P(U_1 + ... + U_n <= x) for independent uniforms on [0, 1)."""
    if x <= 0:
        return 0.0
    if x >= n:
        return 1.0
    total = math.fsum((-1) ** k * math.comb(n, k) * (x - k) ** n for k in range(math.floor(x) + 1))
    return min(1.0, max(0.0, total / math.factorial(n)))


def asymptotic_main_term(s: int, eta, tau) -> float:
    """2 eta Gamma(4/3)^s Gamma(s/3)^-1 tau^(s/3 - 1)."""
    if s < 1:
        raise ValueError("s must be positive")
    eta, tau = float(eta), float(tau)
    if eta <= 0 or tau <= 0:
        raise ValueError("eta and tau must be positive")
    g = math.gamma(4 / 3)
    try:
        return 2 * eta * g**s / math.gamma(s / 3) * tau ** (s / 3 - 1)
    except OverflowError:
        return math.exp(math.log(2 * eta) + s * math.log(g) - math.lgamma(s / 3)
                        + (s / 3 - 1) * math.log(tau))


# -- fourth moments ---------------------------------------------------------

def _iroot_floor(n: int, k: int) -> int:
    """Largest m >= 0 with m**k <= n."""
    if n < 0:
        raise ValueError("negative radicand")
    if n < 2:
        return n
    m = int(round(n ** (1.0 / k))) if n.bit_length() < 1000 else 1 << (n.bit_length() // k + 1)
    while m**k > n:
        m -= 1
    while (m + 1) ** k <= n:
        m += 1
    return m


def _floor_power(P: Fraction, e: Fraction, factor: int = 1) -> int:
    """floor(factor * P**e) for rational P > 0 and rational exponent e in (0, 1]."""
    a, b = e.numerator, e.denominator
    y = Fraction(factor) ** b * P**a
    return _iroot_floor(math.floor(y), b)


@dataclass(frozen=True)
class MomentRanges:
    """Primary range (P, cP] and diminishing secondary range (P^e, 2P^e]."""

    P: Fraction
    c: Fraction = Fraction(2)
    secondary_exponent: Fraction = Fraction(5, 6)

    def __post_init__(self):
        object.__setattr__(self, "P", _to_fraction(self.P))
        object.__setattr__(self, "c", _to_fraction(self.c))
        object.__setattr__(self, "secondary_exponent", Fraction(self.secondary_exponent))
        if self.P <= 0 or self.c <= 1:
            raise ValueError("need P > 0 and c > 1")
        if self.secondary_exponent not in (Fraction(5, 6), Fraction(4, 5)):
            raise ValueError("secondary exponent must be 5/6 or 4/5")
        if not self.primary or not self.secondary:
            raise ValueError("moment ranges are empty")

    @property
    def primary(self) -> range:
        return range(math.floor(self.P) + 1, math.floor(self.c * self.P) + 1)

    @property
    def secondary(self) -> range:
        e = self.secondary_exponent
        return range(_floor_power(self.P, e) + 1, _floor_power(self.P, e, 2) + 1)

    @property
    def diagonal_count(self) -> int:
        return len(self.primary) * len(self.secondary)


def _to_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, float)):
        return Fraction(value)
    return _coerce_real(value).as_fraction()


def _s4_count(f1, f2, ranges: MomentRanges, eta, max_table=None) -> int:
    eta = _coerce_real(eta)
    if eta.sign() <= 0:
        raise ValueError("eta must be positive")
    tables = [
        TermTable.for_term(f1, ranges.primary),
        TermTable.for_term(f1, ranges.primary, sign=-1),
        TermTable.for_term(f2, ranges.secondary),
        TermTable.for_term(f2, ranges.secondary, sign=-1),
    ]
    return _mitm(tables, -eta, eta, False, max_table)


def count_S4_shifted(mu1, mu2, P, eta, secondary_exponent=Fraction(5, 6),
                     max_table: int | None = None) -> int:
    """Solutions of |(x1-mu1)^3 - (y1-mu1)^3 + (x2-mu2)^3 - (y2-mu2)^3| < eta.

    x1, y1 range over (P, 2P] and x2, y2 over (P^(5/6), 2P^(5/6)].
    """
    P = _to_fraction(P)
    if P < 8:
        raise ValueError("count_S4_shifted needs P >= 8")
    m1, m2 = _as_spec(mu1).exact(), _as_spec(mu2).exact()
    ranges = MomentRanges(P, Fraction(2), secondary_exponent)
    return _s4_count(lambda x: (x - m1) ** 3, lambda x: (x - m2) ** 3, ranges, eta, max_table)


def count_S4_general(h1: CubicPolynomial, h2: CubicPolynomial, c, P, eta,
                     secondary_exponent=Fraction(4, 5), max_table: int | None = None) -> int:
    """As count_S4_shifted for general cubics, over (P, cP] and (P^(4/5), 2P^(4/5)]."""
    P = _to_fraction(P)
    if P < 16:
        raise ValueError("count_S4_general needs P >= 16")
    ranges = MomentRanges(P, _to_fraction(c), secondary_exponent)
    return _s4_count(h1, h2, ranges, eta, max_table)


def diagonal_only_check(h: CubicPolynomial, P, eta, max_range: int = 10**7) -> bool:
    """True iff every pair P < x, y <= 2P with |h(x) - h(y)| < eta has x == y."""
    P = _to_fraction(P)
    eta = _coerce_real(eta)
    if h.exact_coefficients[0].sign() < 0:
        h = h.negated()
    b3, b2, b1, _ = (float(c) for c in h.exact_coefficients)
    # h'(x) = 3 b3 x^2 + 2 b2 x + b1 must be positive on (P, 2P]
    disc = b2 * b2 - 3 * b3 * b1
    top_root = (-b2 + math.sqrt(disc)) / (3 * b3) if disc > 0 else -math.inf
    if top_root > float(P):
        raise ValueError(f"h is not increasing beyond P={P}: critical point at {top_root:.6g}")
    xs = range(math.floor(P) + 1, math.floor(2 * P) + 1)
    if len(xs) > max_range:
        raise BudgetExceededError(f"range of {len(xs)} integers exceeds {max_range}")
    if len(xs) < 2:
        return True
    values = [h(x) for x in xs]
    approx = np.array([float(v) for v in values])
    order = np.argsort(approx, kind="stable")
    for a, b in zip(order[:-1], order[1:]):
        if abs(values[b] - values[a]) < eta:
            return False
    return True
