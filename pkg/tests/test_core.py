from fractions import Fraction

import mpmath as mp
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cubeshift.core import (
    CubicPolynomial,
    CubicSystem,
    DecimalSpec,
    DimensionError,
    Enclosure,
    ExactReal,
    ParseError,
    RationalSpec,
    SearchBox,
    ShiftedCubeForm,
    SurdSpec,
    UndecidableError,
    Window,
    continued_fraction,
    eval_form,
    eval_system,
    in_window,
    load_form,
    parse_exact,
    parse_real,
    surd_reduced_mod_one,
)


@pytest.fixture(autouse=True, scope="module")
def high_precision():
    # other modules lower the global mpmath precision
    with mp.workdps(120):
        yield


fractions = st.fractions(min_value=-5, max_value=5, max_denominator=50)


def mp_value(x: ExactReal):
    return sum(mp.mpf(c.numerator) / c.denominator * mp.sqrt(d) for d, c in x.terms.items())


# -- codec -------------------------------------------------------------------

def test_parse_variants():
    assert parse_real("-7/2") == RationalSpec(-7, 2)
    assert parse_real("6/4") == RationalSpec(3, 2)
    s = parse_real("surd:1,1,2,2")
    assert isinstance(s, SurdSpec) and s.certified_irrational
    d = parse_real("dec:0.3333!irr")
    assert isinstance(d, DecimalSpec) and d.declared_irrational
    assert not d.certified_rational


@pytest.mark.parametrize("bad", ["1//2", "1/0", "surd:1,1,4,1", "dec:1.2.3", "", "abc", "surd:1,1,2,0"])
def test_parse_rejects_malformed(bad):
    with pytest.raises(ParseError):
        parse_real(bad)


@given(st.sampled_from(["3", "-7/2", "surd:1,1,2,2", "surd:-3,2,5,7", "dec:0.125", "dec:-1.5e3!irr"]))
def test_encode_roundtrip(text):
    spec = parse_real(text)
    assert parse_real(spec.encode()).exact() == spec.exact()


def test_parse_exact_plain_decimal():
    assert parse_exact("0.25") == ExactReal.rational(Fraction(1, 4))
    assert parse_exact("1e-3") == ExactReal.rational(Fraction(1, 1000))
    with pytest.raises(ParseError):
        parse_exact("1..2")


def test_surd_reduced_mod_one():
    for n in (2, 3, 5, 8, 12):
        v = surd_reduced_mod_one(n).exact()
        assert 0 <= v < 1
        assert abs(mp_value(v) - (mp.sqrt(n) - mp.floor(mp.sqrt(n)))) < mp.mpf(10) ** -50
    assert surd_reduced_mod_one(9).exact() == 0


# -- exact arithmetic ----------------------------------------------------------

@given(fractions, fractions, fractions, fractions)
def test_field_operations_match_mpmath(a, b, c, d):
    x = ExactReal.rational(a) + ExactReal.sqrt(2, b)
    y = ExactReal.rational(c) + ExactReal.sqrt(3, d)
    for got, want in [(x + y, mp_value(x) + mp_value(y)), (x * y, mp_value(x) * mp_value(y)),
                      (x - y, mp_value(x) - mp_value(y))]:
        assert abs(mp_value(got) - want) < mp.mpf(10) ** -45
    if not y.is_zero():
        assert abs(mp_value(x / y) - mp_value(x) / mp_value(y)) < mp.mpf(10) ** -40


@given(fractions, fractions, st.integers(0, 200))
def test_enclosure_brackets_value(a, b, bits):
    x = ExactReal.rational(a) + ExactReal.sqrt(5, b)
    lo, hi = x.enclosure(bits)
    v = mp_value(x) * mp.mpf(2) ** bits
    assert lo <= v <= hi and hi - lo <= 2


@given(fractions, fractions)
def test_floor_and_sign(a, b):
    x = ExactReal.rational(a) + ExactReal.sqrt(7, b)
    assert x.floor() == int(mp.floor(mp_value(x)))
    assert x.sign() == (0 if x.is_zero() else (1 if mp_value(x) > 0 else -1))


def test_continued_fraction_sqrt2():
    cf = continued_fraction(ExactReal.sqrt(2))
    assert [next(cf) for _ in range(8)] == [1, 2, 2, 2, 2, 2, 2, 2]
    assert list(continued_fraction(ExactReal.rational(Fraction(22, 7)))) == [3, 7]


def test_rational_ratio():
    assert ExactReal.sqrt(2).has_rational_ratio(ExactReal.sqrt(8))
    assert not ExactReal.sqrt(2).has_rational_ratio(ExactReal.rational(1))


# -- eval_form / eval_system ----------------------------------------------------

def test_eval_form_examples():
    assert eval_form(ShiftedCubeForm((0, 0)), (1, 2)) == 9
    assert eval_form(ShiftedCubeForm((Fraction(1, 2),)), (1,)) == ExactReal.rational(Fraction(1, 8))
    v = eval_form(ShiftedCubeForm(("surd:0,1,2,1",)), (2,))
    assert v == 20 - ExactReal.sqrt(2, 14)
    # 30-digit value from mpmath
    assert mp.nstr(mp_value(v), 30) == "0.201010126776669316776357861064"


def test_eval_form_dimension_mismatch():
    with pytest.raises(DimensionError):
        eval_form(ShiftedCubeForm((0, 0)), (1,))


def test_eval_system_examples():
    cube = CubicSystem((CubicPolynomial(1, 0, 0, 0),))
    assert eval_system(cube, (3,)) == 27
    shifted = CubicSystem((CubicPolynomial(1, -3, 3, -1),))
    assert eval_system(shifted, (2,)) == 1
    surd = CubicSystem((CubicPolynomial(1, 0, "surd:0,1,2,1", 0),))
    v = eval_system(surd, (1,))
    assert mp.nstr(mp_value(v), 30) == "2.41421356237309504880168872421"


def test_short_decimal_rejected_in_evaluation():
    form = ShiftedCubeForm(("dec:0.5",))
    with pytest.raises(ValueError):
        eval_form(form, (1,))


@given(st.lists(fractions, min_size=2, max_size=4), st.data())
def test_eval_form_permutation_invariant(shifts, data):
    x = data.draw(st.lists(st.integers(-20, 20), min_size=len(shifts), max_size=len(shifts)))
    perm = data.draw(st.permutations(range(len(shifts))))
    form = ShiftedCubeForm(tuple(shifts))
    assert eval_form(form, x) == eval_form(form.permuted(perm), [x[i] for i in perm])


@given(st.lists(fractions, min_size=1, max_size=4), st.data())
def test_eval_form_rational_exact(shifts, data):
    x = data.draw(st.lists(st.integers(-30, 30), min_size=len(shifts), max_size=len(shifts)))
    want = sum((xi - Fraction(m)) ** 3 for xi, m in zip(x, shifts))
    assert eval_form(ShiftedCubeForm(tuple(shifts)), x).as_fraction() == want


# -- windows ----------------------------------------------------------------------

def test_in_window_examples():
    w = Window(Fraction(5), Fraction(1, 4))
    assert in_window(5, w)
    assert not in_window(Fraction(21, 4), w)
    assert not in_window(Fraction(19, 4), w)
    assert in_window(Fraction(21, 4) - Fraction(1, 10**9), w)


def test_in_window_exact_boundary_with_surds():
    root2 = ExactReal.sqrt(2)
    w = Window(root2, ExactReal.rational(Fraction(1, 3)))
    assert not in_window(root2 + Fraction(1, 3), w)
    assert in_window(root2 + Fraction(1, 3) - Fraction(1, 10**40), w)


def test_in_window_enclosure_straddle():
    w = Window(0, 1)
    with pytest.raises(UndecidableError):
        in_window(Enclosure(Fraction(9, 10), Fraction(11, 10)), w)
    assert in_window(Enclosure(Fraction(-1, 2), Fraction(1, 2)), w)


@given(fractions, fractions, st.fractions(min_value=Fraction(1, 100), max_value=3))
def test_in_window_monotone_in_eta(value, tau, eta):
    if in_window(value, Window(tau, eta)):
        assert in_window(value, Window(tau, eta + Fraction(1, 7)))


def test_window_rejects_nonpositive_eta():
    with pytest.raises(ValueError):
        Window(1, 0)


# -- boxes and config ---------------------------------------------------------------

def test_search_box():
    box = SearchBox.parse("0:3,-1:1")
    assert box.volume == 6
    assert list(box.coords(1)) == [0, 1]
    with pytest.raises(ParseError):
        SearchBox.parse("0-3")
    with pytest.raises(ValueError):
        SearchBox(((2, 2),))


def test_box_below_floor_shift_rejected():
    form = ShiftedCubeForm(("3/2",))
    with pytest.raises(ValueError):
        SearchBox(((0, 5),)).check_for_form(form)


def test_load_form_variants(tmp_path):
    form = load_form('{"shifts": ["1/2", "surd:1,1,2,2"]}')
    assert isinstance(form, ShiftedCubeForm) and form.s == 2
    path = tmp_path / "sys.json"
    path.write_text('{"polys": [["1", "0", "surd:0,1,2,1", "0"]]}')
    system = load_form(str(path))
    assert isinstance(system, CubicSystem)
    with pytest.raises(ParseError):
        load_form('{"shifts": [0.5]}')
    with pytest.raises(ParseError):
        load_form('{"other": 1}')
    assert load_form(form.to_json()) == form
