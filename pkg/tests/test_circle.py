import math
from fractions import Fraction

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cubeshift.circle import (
    MAJOR,
    MINOR,
    TRIVIAL,
    ArcParams,
    KernelParams,
    U,
    classify_arc,
    classify_classical,
    complete_exp_sum,
    differenced_aggregate,
    differenced_weyl_sum,
    dirichlet_approx,
    dirichlet_volume,
    fourier_closed_form,
    kernel_fourier,
    kernel_K,
    kernel_K1,
    kernel_K2pm,
    kernel_Kpm,
    representation_integral,
    singular_integral,
    weyl_sum,
)
from cubeshift.circle.sums import fast_shifted_weyl
from cubeshift.core import (
    BudgetExceededError,
    CubicPolynomial,
    ExactReal,
    QuadratureError,
    ShiftedCubeForm,
    Window,
    parse_exact,
)


def mp_exact(x: ExactReal):
    return sum(mp.mpf(c.numerator) / c.denominator * mp.sqrt(d) for d, c in x.terms.items())


# -- Weyl sums -----------------------------------------------------------------------

def mp_weyl(alpha, mu, lo, hi):
    return sum(mp.expjpi(2 * alpha * (x - mu) ** 3) for x in range(lo + 1, hi + 1))


@pytest.mark.parametrize("alpha,mu,X", [
    ("surd:0,1,2,1000", "1/2", 300),
    ("1/7", "surd:0,1,3,1", 250),
    ("surd:1,1,5,3", "surd:-1,1,2,1", 400),
])
def test_weyl_sum_against_mpmath(alpha, mu, X):
    mp.mp.dps = 60
    a, m = parse_exact(alpha), parse_exact(mu)
    for j in (1, 2):
        got = weyl_sum(j, alpha, mu, X)
        want = mp_weyl(mp_exact(a), mp_exact(m), (j - 1) * X, j * X)
        assert abs(got - complex(want)) < 1e-10


def test_weyl_sum_zero_alpha_and_bounds():
    assert weyl_sum(1, 0, "1/3", Fraction(101, 2)) == 50
    for alpha in ("surd:0,1,2,1", "3/11", "1/1000000"):
        for j in (1, 2):
            assert abs(weyl_sum(j, alpha, "1/2", 500)) <= 500 + 1e-9


def test_weyl_splitting_identity():
    for alpha, mu in [("surd:0,1,2,1", "1/2"), ("surd:0,3,7,13", "surd:0,1,3,4")]:
        f2 = weyl_sum(2, alpha, mu, 700)
        f1 = weyl_sum(1, alpha, mu, 700)
        f1_2x = weyl_sum(1, alpha, mu, 1400)
        assert abs(f2 - (f1_2x - f1)) < 1e-11


def test_weyl_sum_large_phases():
    # alpha * x^3 reaches about 1e12 here; compare with mpmath summed in full precision
    mp.mp.dps = 50
    got = weyl_sum(1, "surd:0,1,2,1", "1/3", 9000)
    alpha, mu = mp.sqrt(2), mp.mpf(1) / 3
    want = sum(mp.expjpi(2 * ((alpha * (x - mu) ** 3) % 1)) for x in range(1, 9001))
    assert abs(got - complex(want)) < 1e-8


def test_weyl_sum_rejects():
    with pytest.raises(ValueError):
        weyl_sum(3, 0, 0, 10)
    with pytest.raises(BudgetExceededError):
        weyl_sum(1, "1/3", 0, 2 * 10**7)


def test_fast_weyl_matches_exact():
    alphas = np.array([0.0, 1e-5, 3.3e-4, 0.01])
    vals, err = fast_shifted_weyl(alphas, "surd:0,1,2,2", 60)
    for a, v in zip(alphas, vals):
        want = weyl_sum(1, ExactReal.rational(Fraction(float(a))), "surd:0,1,2,2", 60)
        assert abs(v - want) <= err + 1e-9


def test_differenced_sum():
    h = CubicPolynomial.shifted_cube("surd:0,1,2,1")
    assert differenced_weyl_sum(h, 0, 3, 50) == 50
    with pytest.raises(ValueError):
        differenced_weyl_sum(h, "1/3", 0, 50)
    mp.mp.dps = 50
    alpha = mp.mpf(1) / 7 + mp.sqrt(3) / 1000
    hh = lambda x: (x - mp.sqrt(2)) ** 3  # noqa: E731
    want = sum(mp.expjpi(2 * alpha * (hh(x + 2) - hh(x))) for x in range(41, 81))
    got = differenced_weyl_sum(h, "surd:1000,7,3,7000", 2, 40)
    assert abs(got - complex(want)) < 1e-10


def test_differenced_aggregate_peaks_at_small_denominators():
    h = CubicPolynomial(1, 0, 0, 0)
    P, H = 200, 20
    assert abs(differenced_aggregate(h, 0, H, P)) == pytest.approx(H * P)
    rational = max(abs(differenced_aggregate(h, a, H, P)) for a in ("1/3", "1/4", "2/7"))
    irrational = max(abs(differenced_aggregate(h, a, H, P))
                     for a in ("surd:0,1,2,1", "surd:0,1,3,1", "surd:0,1,5,7", "surd:0,1,7,10"))
    assert rational > 3 * irrational


def test_complete_exp_sum():
    assert complete_exp_sum(7, (0, 0, 0)) == 7
    assert abs(complete_exp_sum(2, (1, 0, 0))) < 1e-15
    mp.mp.dps = 30
    for q, v in [(13, (1, 2, 3)), (30, (7, 0, 11)), (97, (5, 5, 5))]:
        want = sum(mp.expjpi(2 * mp.mpf((v[0] * x**3 + v[1] * x**2 + v[2] * x) % q) / q) for x in range(1, q + 1))
        got = complete_exp_sum(q, v)
        assert abs(got - complex(want)) < 1e-12
        assert abs(got) <= q + 1e-9


# -- kernels -------------------------------------------------------------------------------

def test_kernel_K_values():
    for eta in (0.1, 0.25, 1.0):
        assert kernel_K(0.0, eta) == eta
        assert abs(kernel_K(1 / eta, eta)) < 1e-30
        a = np.linspace(0.01, 50, 2001)
        k = kernel_K(a, eta)
        assert (k >= 0).all()
        assert (k <= np.minimum(eta, 1 / (math.pi**2 * a**2 * eta)) * (1 + 1e-12)).all()


def test_kernel_params_invariant():
    with pytest.raises(ValueError):
        KernelParams(0.25, 0.5)
    with pytest.raises(ValueError):
        KernelParams(-1.0)
    with pytest.raises(ValueError):
        kernel_Kpm(0.0, KernelParams(0.25), 1)


def test_kpm_bounds():
    eta, delta = 0.25, 0.05
    p = KernelParams(eta, delta)
    L = eta / delta
    a = np.linspace(0.01, 100, 5001)
    for sign in (1, -1):
        assert kernel_Kpm(0.0, p, sign) == pytest.approx(2 * eta + sign * delta, rel=1e-15)
        k = np.abs(kernel_Kpm(a, p, sign))
        assert (k <= np.minimum(2 * eta + delta, L / (math.pi**2 * eta * a**2)) * (1 + 1e-12)).all()


@given(st.floats(-1e3, 1e3), st.floats(0.01, 2.0), st.floats(0.05, 0.95))
def test_kpm_factorization(alpha, eta, frac):
    p = KernelParams(eta, 2 * eta * frac)
    k1 = kernel_K1(alpha, p)
    for sign in (1, -1):
        lhs = kernel_Kpm(alpha, p, sign) ** 2
        rhs = k1 * kernel_K2pm(alpha, p, sign)
        assert abs(lhs - rhs) <= 1e-12 * max(abs(lhs), abs(rhs), 1e-300)


def test_kernel_fourier_examples():
    eta = 0.25
    p = KernelParams(eta)
    for t, want in [(0.0, 1.0), (eta / 2, 0.5), (2 * eta, 0.0)]:
        v = kernel_fourier(t, "K", p)
        assert abs(v.value - want) <= 1e-8 and v.error <= 1e-8


@pytest.mark.parametrize("kernel", ["K", "K2", "Kplus", "Kminus", "K1", "K2plus", "K2minus"])
def test_kernel_fourier_matches_closed_forms(kernel):
    p = KernelParams(0.5, 0.2)
    for t in np.linspace(-1.6, 1.6, 9):
        v = kernel_fourier(float(t), kernel, p)
        assert abs(v.value - float(fourier_closed_form(t, kernel, p))) <= max(v.error, 1e-9) + 1e-9


def test_kernel_fourier_reports_failure():
    with pytest.raises(QuadratureError):
        kernel_fourier(0.3, "K", KernelParams(0.25), tol=1e-30)


def test_indicator_is_strict():
    assert U(0.25, 0.25) == 0 and U(0.2499, 0.25) == 1


# -- singular integral ------------------------------------------------------------------------

def test_singular_integral_basics():
    assert singular_integral(0, 3.5).value == 3.5
    a = singular_integral(0.37, 4.0)
    b = singular_integral(-0.37, 4.0)
    assert abs(a.value - b.value.conjugate()) < 1e-12


@pytest.mark.parametrize("alpha,X", [(0.05, 3.0), (1.3, 5.0), (1e-3, 40.0)])
def test_singular_integral_against_mpmath(alpha, X):
    mp.mp.dps = 30
    xs = mp.linspace(X, 2 * X, 400)
    want = sum(mp.quad(lambda x: mp.expjpi(2 * alpha * x**3), [a, b]) for a, b in zip(xs[:-1], xs[1:]))
    r = singular_integral(alpha, X)
    assert abs(r.value - complex(want)) <= 1e-9 * X
    assert r.error <= 1e-9 * X


def test_singular_integral_decay():
    P = 10.0
    moderate = [0.02, 0.05, 0.1]
    C = max(abs(singular_integral(a, P).value) * a ** (1 / 3) for a in moderate)
    for a in (0.5, 2.0, 8.0):
        assert abs(singular_integral(a, P).value) <= C * a ** (-1 / 3)


# -- arcs and approximation ------------------------------------------------------------------

def test_dirichlet_examples():
    r = dirichlet_approx(math.pi, 100)
    assert (r.a, r.q) == (22, 7) and r.err == pytest.approx(0.008851424871, rel=1e-9)
    r = dirichlet_approx(Fraction(1, 3), 10)
    assert (r.a, r.q, r.err) == (1, 3, 0.0)
    r = dirichlet_approx("surd:0,1,2,1", 1000)
    assert (r.a, r.q) == (1393, 985) and r.err <= 1e-3


@given(st.floats(-50, 50, allow_nan=False), st.integers(1, 10**6))
def test_dirichlet_contract(alpha, Q):
    r = dirichlet_approx(alpha, Q)
    exact = abs(r.q * Fraction(alpha) - r.a)
    assert 1 <= r.q <= Q and exact <= Fraction(1, Q) and math.gcd(r.a, r.q) == 1


def test_arc_params():
    with pytest.raises(ValueError):
        ArcParams(1.0)
    with pytest.raises(ValueError):
        ArcParams(100.0, xi=1.0)
    with pytest.raises(ValueError):
        ArcParams(2.0)  # log 2 < 1 needs an explicit T
    assert ArcParams(100.0).T == pytest.approx(math.log(100))


def test_classify_arc():
    arcs = ArcParams(100.0, 0.5, 5.0)
    assert classify_arc(0.0, arcs) == MAJOR
    assert classify_arc(arcs.T + 1, arcs) == TRIVIAL
    assert classify_arc(2 * arcs.major_radius, arcs) == MINOR
    assert classify_arc(-arcs.major_radius, arcs) == MAJOR
    assert classify_arc(arcs.T, arcs) == MINOR


def classical_oracle(alpha: Fraction, P: int):
    for q in range(1, P + 1):
        for a in (math.floor(q * alpha), math.ceil(q * alpha)):
            if math.gcd(a, q) == 1 and (q * alpha - a) ** 2 <= Fraction(1, P**3):
                return q, a
    return None


def test_classify_classical_examples():
    m = classify_classical(Fraction(3, 7), 100)
    assert m.in_major and (m.q, m.a, m.err) == (7, 3, 0.0)
    alpha = Fraction(1, 2) + Fraction(4, 10) * Fraction(1, 1000)
    m = classify_classical(alpha, 100)
    assert m.in_major and (m.q, m.a) == (2, 1)
    golden = "surd:1,1,5,2"
    outside = sum(not classify_classical(golden, P).in_major for P in range(50, 2000, 37))
    assert outside >= 45


@given(st.fractions(min_value=-3, max_value=3, max_denominator=10**6), st.integers(2, 60))
def test_classify_classical_against_scan(alpha, P):
    m = classify_classical(alpha, P)
    want = classical_oracle(alpha, P)
    if want is None:
        assert not m.in_major
    else:
        assert m.in_major and m.q == want[0]
        assert (m.q * alpha - m.a) ** 2 <= Fraction(1, P**3)


# -- representation integral and Dirichlet volume ----------------------------------------------

def test_representation_integral_small_box():
    form = ShiftedCubeForm(("1/2", "1/3"))
    w = Window(Fraction(223, 10), 1)
    arcs = ArcParams(4.0, 0.5, 2.0)
    r = representation_integral(form, w, arcs, "K", R=400)
    assert abs(r.value - r.weighted_count) <= r.error
    assert set(r.by_arc) == {MAJOR, MINOR, TRIVIAL}
    assert r.value == pytest.approx(sum(r.by_arc.values()))


def test_representation_integral_budget():
    with pytest.raises(BudgetExceededError):
        representation_integral(ShiftedCubeForm((0, 0, 0)), Window(10, 1), ArcParams(200.0), R=10)


def test_dirichlet_volume_values():
    mp.mp.dps = 30
    for s in (1, 2, 3, 5):
        want = float(mp.gamma(mp.mpf(1) / 3) ** s / mp.gamma(mp.mpf(s) / 3))
        d = dirichlet_volume(s)
        assert d.closed_form == pytest.approx(want, rel=1e-13)
        assert abs(d.estimate - want) <= max(d.error, 1e-12 * want)
    assert dirichlet_volume(2).closed_form == pytest.approx(5.29991625085635, rel=1e-13)
    with pytest.raises(ValueError):
        dirichlet_volume(0)


def test_dirichlet_volume_s2_by_direct_quadrature():
    mp.mp.dps = 30
    direct = mp.quad(lambda u: (u * (1 - u)) ** (-mp.mpf(2) / 3), [0, 0.5, 1])
    assert dirichlet_volume(2).estimate == pytest.approx(float(direct), rel=1e-10)
