import itertools
from fractions import Fraction

import mpmath as mp
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cubeshift.core import BudgetExceededError, ShiftedCubeForm, Window, surd_reduced_mod_one
from cubeshift.density import (
    IntervalSet,
    cube_sum_volume,
    cube_sum_volume_mc,
    density_profile,
    represented_set,
    unrepresented_measure,
    volume_bound_theorem4,
)
from cubeshift.solver import count_window

CUBE = ShiftedCubeForm((0,))


def test_single_cube_windows():
    rep = represented_set(CUBE, 0, 10, Fraction(1, 4))
    assert rep.intervals == [(Fraction(3, 4), Fraction(5, 4)), (Fraction(31, 4), Fraction(33, 4))]
    assert float(unrepresented_measure(CUBE, 0, 10, Fraction(1, 4))) == 9.0


def test_wide_windows_merge_and_cover():
    rep = represented_set(CUBE, 0, 10, 5)
    assert rep.intervals == [(0, 10)]
    m = unrepresented_measure(CUBE, 0, 10, 5)
    assert m.lower <= 0 <= m.upper


def test_two_cubes():
    # sums of two positive cubes below 20.25 are 2, 9 and 16
    rep = represented_set(ShiftedCubeForm((0, 0)), 0, 20, Fraction(1, 4))
    assert [float(a + b) / 2 for a, b in rep.intervals] == [2.0, 9.0, 16.0]
    assert rep.measure() == Fraction(3, 2)


def test_interval_set_canonical():
    s = IntervalSet.from_intervals([(3, 4), (0, 1), (Fraction(1, 2), 2), (2, 3)])
    # (0, 2) and (2, 3) only touch, and open intervals do not cover 2
    assert s.intervals == [(0, 2), (2, 3), (3, 4)]
    again = s.union(IntervalSet.from_intervals([]))
    assert again.intervals == s.intervals
    assert not s.contains(2) and s.contains(Fraction(5, 2))
    assert s.measure_below(Fraction(5, 2)) == Fraction(5, 2)
    assert s.clip(1, 3).intervals == [(1, 2), (2, 3)]


def mp_union_measure(shifts, A, B, eta):
    """Union of windows from an mpmath enumeration, for cross-checking."""
    mp.mp.dps = 60
    mus = [mp.mpf(float(m)) if isinstance(m, (int, Fraction)) else m for m in shifts]
    top = mp.mpf(B) + eta
    ranges = [range(int(mp.floor(m)) + 1, int(mp.floor(m + mp.cbrt(top))) + 2) for m in mus]
    centres = sorted(
        v for v in (sum((x - m) ** 3 for x, m in zip(xs, mus)) for xs in itertools.product(*ranges))
        if v < top
    )
    total, cur_a, cur_b = mp.mpf(0), None, None
    for c in centres:
        a, b = max(c - eta, mp.mpf(A)), min(c + eta, mp.mpf(B))
        if b <= a:
            continue
        if cur_b is not None and a < cur_b:
            cur_b = max(cur_b, b)
        else:
            if cur_b is not None:
                total += cur_b - cur_a
            cur_a, cur_b = a, b
    if cur_b is not None:
        total += cur_b - cur_a
    return total


def test_irrational_measure_against_mpmath():
    mp.mp.dps = 60
    shifts_spec = [surd_reduced_mod_one(2), surd_reduced_mod_one(3)]
    shifts_mp = [mp.sqrt(2) - 1, mp.sqrt(3) - 1]
    eta = mp.mpf(1) / 5
    want = mp_union_measure(shifts_mp, 0, 400, eta)
    rep = represented_set(ShiftedCubeForm(tuple(shifts_spec)), 0, 400, Fraction(1, 5))
    assert rep.error < Fraction(1, 2**150)
    assert abs(mp.mpf(rep.measure().numerator) / rep.measure().denominator - want) <= rep.error * 2 + mp.mpf(10) ** -40


@given(st.lists(st.fractions(min_value=0, max_value=1, max_denominator=9), min_size=1, max_size=3),
       st.fractions(min_value=Fraction(1, 20), max_value=2, max_denominator=20))
def test_complementarity_and_monotonicity(shifts, eta):
    form = ShiftedCubeForm(tuple(shifts))
    rep = represented_set(form, 0, 300, eta)
    un = unrepresented_measure(form, 0, 300, eta)
    assert un.value + rep.measure() == 300
    bigger = represented_set(form, 0, 300, eta + Fraction(1, 10))
    assert bigger.measure() >= rep.measure() - rep.error - bigger.error
    starts, ends = rep.starts, rep.ends
    assert all(a < b for a, b in zip(starts, ends))
    assert all(b <= a for b, a in zip(ends[:-1], starts[1:]))


@given(st.data())
def test_consistency_with_solver(data):
    form = ShiftedCubeForm(("surd:0,1,2,2", "1/3", "2/5"))
    eta = Fraction(1, 4)
    rep = represented_set(form, 1, 200, eta)
    t = data.draw(st.fractions(min_value=2, max_value=199, max_denominator=1000))
    inside = rep.contains(t)
    n = count_window(form, Window(t, eta))
    if inside:
        assert n >= 1
    else:
        near_edge = any(abs(t - e) < Fraction(1, 2**100) for e in rep.starts + rep.ends)
        assert n == 0 or near_edge


def test_budget_guard():
    with pytest.raises(BudgetExceededError):
        represented_set(ShiftedCubeForm((0, 0, 0, 0)), 0, 10**6, Fraction(1, 4), max_points=1000)


def test_rejects_bad_ranges():
    with pytest.raises(ValueError):
        represented_set(CUBE, 5, 5, 1)
    with pytest.raises(ValueError):
        represented_set(CUBE, 0, 5, 0)


def test_volume_examples():
    mp.mp.dps = 30
    v3 = float(mp.gamma(mp.mpf(4) / 3) ** 3)
    assert cube_sum_volume(3) == pytest.approx(v3, rel=1e-14)
    assert cube_sum_volume(1) == pytest.approx(1.0)
    p, err = cube_sum_volume_mc(3, 2_000_000, seed=1)
    assert abs(p - v3) < 5 * err and err < 5e-4
    assert volume_bound_theorem4(0, 10**6) == 0
    # the bound per unit length tends to 2 * 0.25 * V3 = 0.35604
    assert volume_bound_theorem4(0.25, 1e24) / 1e24 == pytest.approx(0.5 * v3, rel=1e-6)
    assert volume_bound_theorem4(0.2, 1e6) == pytest.approx(0.4 * (1e6 + 1e5) * v3, rel=1e-13)
    with pytest.raises(ValueError):
        volume_bound_theorem4(0.25, 0)


def test_profile_single_cube_tends_to_one():
    prof = density_profile(CUBE, 4096, Fraction(1, 4), 5)
    fractions = [float(f) for _, f in prof.rows]
    assert fractions == sorted(fractions)
    assert fractions[-1] > 0.99
    assert not prof.truncated


def test_profile_three_cubes_stays_above_half():
    form = ShiftedCubeForm(tuple(surd_reduced_mod_one(n) for n in (2, 3, 5)))
    prof = density_profile(form, 20000, Fraction(1, 5), 4)
    for (Nk, frac), err in zip(prof.rows, prof.errors):
        assert frac - err > Fraction(1, 2), Nk


def test_profile_truncates_honestly():
    form = ShiftedCubeForm((0, 0, 0, 0))
    prof = density_profile(form, 10**5, Fraction(1, 4), 3, max_points=20000)
    assert prof.truncated and prof.N < 10**5
    assert prof.represented.n_source <= 20000
