"""Singular integrals, the representation integral and the Dirichlet volume."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from ..core.errors import BudgetExceededError, QuadratureError
from ..core.forms import ShiftedCubeForm, Window, eval_form
from .arcs import MAJOR, MINOR, TRIVIAL, ArcParams
from .kernels import KernelParams, cosine_terms, evaluate, fourier_closed_form, panel_quadrature
from .sums import fast_shifted_weyl

PANEL_LIMIT = 5_000_000
BOX_LIMIT = 10**6


@dataclass(frozen=True)
class QuadResult:
    value: complex
    error: float


def singular_integral(alpha: float, X: float, tol: float = 1e-9) -> QuadResult:
    """I(alpha, X): integral of e(alpha x^3) over [X, 2X].

    Panels are equally spaced in x^3, so each covers at most half a turn of
    the phase; the reported error is checked against tol * X.
    """
    alpha, X = float(alpha), float(X)
    if not X > 0:
        raise ValueError("X must be positive")
    if alpha == 0:
        return QuadResult(complex(X), 0.0)
    turns = 7 * abs(alpha) * X**3
    n = max(16, math.ceil(2 * turns))
    if n > PANEL_LIMIT:
        raise QuadratureError(f"{n} panels needed, limit {PANEL_LIMIT}")
    edges = np.cbrt(np.linspace(X**3, 8 * X**3, n + 1))
    edges[0], edges[-1] = X, 2 * X

    def f(x):
        return np.exp(2j * math.pi * np.mod(alpha * x**3, 1.0))

    value, err = panel_quadrature(f, edges)
    err += n * 2.0**-50 * (X / n + 2 * math.pi * abs(alpha) * 8 * X**3 / n)
    if err > tol * X:
        raise QuadratureError(f"singular integral error {err:.3g} exceeds {tol * X:.3g}")
    return QuadResult(complex(value), err)


@dataclass(frozen=True)
class RepresentationIntegral:
    value: float
    quad_error: float
    tail_bound: float
    by_arc: dict = field(default_factory=dict)
    weighted_count: float | None = None

    @property
    def error(self) -> float:
        return self.quad_error + self.tail_bound


def _kernel_params(kernel: str, w: Window, arcs: ArcParams, delta: float | None) -> KernelParams:
    eta = float(w.eta)
    if kernel in ("K", "K2"):
        return KernelParams(eta)
    if delta is None:
        L = min(math.log(arcs.T), math.log(arcs.P))
        delta = eta / max(L, 1.0)
    return KernelParams(eta, delta)


def representation_integral(form: ShiftedCubeForm, w: Window, arcs: ArcParams, kernel: str = "K",
                            R: float = 200.0, delta: float | None = None,
                            with_count: bool = True) -> RepresentationIntegral:
    """Integral over [-R, R] of prod_i g_i(alpha) e(-alpha tau) kernel(alpha).

    g_i(alpha) = f_1(alpha, mu_i, P) with P = floor(arcs.P). By conjugate
    symmetry the integral is 2 Re of the integral over [0, R]. The tail beyond R
    is bounded by prod(n_i) * sum|a_j| / R from the alpha^-2 decay of the
    kernel, doubled for both sides. The weighted count it should converge to,
    sum over the box of the kernel's Fourier transform at F(x) - tau, is
    returned alongside.
    """
    if R <= 0:
        raise ValueError("R must be positive")
    P = int(math.floor(arcs.P))
    s = form.s
    params = _kernel_params(kernel, w, arcs, delta)
    tau = float(w.tau)
    n_total = P**s
    if n_total > BOX_LIMIT:
        raise BudgetExceededError(f"box (0, {P}]^{s} has {n_total} points, limit {BOX_LIMIT}")

    shifts = form.exact_shifts
    cubes = [[float((x - m) ** 3) for x in range(1, P + 1)] for m in shifts]
    fmax = sum(max(abs(c) for c in cs) for cs in cubes) + abs(tau)
    fmax += max(b for _, b in cosine_terms(kernel, params))
    width = 1 / (2 * fmax)

    breaks = sorted({0.0, min(arcs.major_radius, R), min(float(arcs.T), R), R})
    labels = []
    segs = []
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        if hi <= lo:
            continue
        mid = (lo + hi) / 2
        labels.append(MAJOR if mid <= arcs.major_radius else MINOR if mid <= arcs.T else TRIVIAL)
        segs.append((lo, hi))
    n_panels = sum(math.ceil((hi - lo) / width) for lo, hi in segs)
    if n_panels > PANEL_LIMIT:
        raise BudgetExceededError(f"{n_panels} quadrature panels exceed the limit {PANEL_LIMIT}")

    phase_err = [0.0]

    def integrand(alpha):
        flat = alpha.ravel()
        prod = np.exp(-2j * math.pi * np.mod(flat * tau, 1.0))
        for m in shifts:
            g, err = fast_shifted_weyl(flat, m, P)
            prod = prod * g
            phase_err[0] = max(phase_err[0], err)
        return (prod * evaluate(kernel, flat, params)).reshape(alpha.shape)

    by_arc = {MAJOR: 0.0, MINOR: 0.0, TRIVIAL: 0.0}
    qerr = 0.0
    for label, (lo, hi) in zip(labels, segs):
        edges = np.linspace(lo, hi, math.ceil((hi - lo) / width) + 1)
        val, err = panel_quadrature(integrand, edges)
        by_arc[label] += 2 * complex(val).real
        qerr += 2 * err
    # rounding in the float Weyl sums, integrated against |kernel| <= kernel(0)
    k0 = float(evaluate(kernel, 0.0, params))
    qerr += 2 * R * k0 * (s * n_total / P * phase_err[0] + n_total * 2.0**-50)
    amp = sum(abs(a) for a, _ in cosine_terms(kernel, params))
    tail = 2 * n_total * amp / R

    count = None
    if with_count:
        count = weighted_count(form, w, P, kernel, params)
    return RepresentationIntegral(sum(by_arc.values()), qerr, tail, by_arc, count)


def weighted_count(form: ShiftedCubeForm, w: Window, P: int, kernel: str, params: KernelParams) -> float:
    """sum over x in (0, P]^s of the kernel's transform at F(x) - tau."""
    diffs = [float(eval_form(form, x) - w.tau) for x in itertools.product(range(1, P + 1), repeat=form.s)]
    return math.fsum(fourier_closed_form(np.array(diffs), kernel, params))


@dataclass(frozen=True)
class DirichletVolume:
    closed_form: float
    estimate: float
    error: float


def dirichlet_volume(s: int) -> DirichletVolume:
    """Integral over the simplex sum u < 1 in (0,1]^(s-1) of (u_1...u_{s-1}(1 - sum u))^(-2/3).

    The estimate integrates out one coordinate at a time: each step is a 1-D
    Beta-type integral with algebraic endpoint singularities, evaluated by
    weighted quadrature rather than through the Gamma function.
    """
    if not isinstance(s, int) or s < 1:
        raise ValueError("s must be a positive integer")
    closed = math.gamma(1 / 3) ** s / math.gamma(s / 3)
    estimate, rel = 1.0, 0.0
    for k in range(1, s):
        val, err = quad(lambda u: 1.0, 0.0, 1.0, weight="alg", wvar=(-2 / 3, k / 3 - 1))
        estimate *= val
        rel += err / val
    return DirichletVolume(closed, estimate, estimate * rel + 1e-14 * estimate)
