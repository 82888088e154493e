"""Davenport-Heilbronn style kernels and numerical checks of their Fourier transforms.

All kernels here are even, real and decay like alpha**-2. Each can be written
as sum_j a_j * cos(2*pi*b_j*alpha) / alpha**2, which gives an exact expression
for the tail of the Fourier integral beyond the truncation point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_legendre, sici

from ..core.errors import QuadratureError

KERNELS = ("K", "K2", "Kplus", "Kminus", "K1", "K2plus", "K2minus")


def sinc(x):
    """Unnormalised sinc: sin(x)/x with sinc(0) = 1."""
    return np.sinc(np.asarray(x, dtype=float) / math.pi)


@dataclass(frozen=True)
class KernelParams:
    eta: float
    delta: float | None = None

    def __post_init__(self):
        if not self.eta > 0:
            raise ValueError("eta must be positive")
        if self.delta is not None and not 0 < self.delta < 2 * self.eta:
            raise ValueError("need 0 < delta < 2*eta")

    def need_delta(self) -> float:
        if self.delta is None:
            raise ValueError("this kernel needs delta")
        return self.delta


def U(t, kappa):
    """Indicator of |t| < kappa."""
    return (np.abs(np.asarray(t, dtype=float)) < kappa).astype(float)


def kernel_K(alpha, eta):
    """eta * sinc(pi*alpha*eta)**2."""
    return eta * sinc(math.pi * np.asarray(alpha, dtype=float) * eta) ** 2


def kernel_K_double(alpha, eta):
    """K(2*alpha); four times its transform is max(0, 2 - |t/eta|)."""
    return kernel_K(2 * np.asarray(alpha, dtype=float), eta)


def _width(params: KernelParams, sign: int) -> float:
    return 2 * params.eta + sign * params.need_delta()


def kernel_Kpm(alpha, params: KernelParams, sign: int):
    """sin(pi a d) sin(pi a (2 eta +- d)) / (pi^2 a^2 d), equal to 2 eta +- d at 0."""
    a = np.asarray(alpha, dtype=float)
    d = params.need_delta()
    c = _width(params, sign)
    return c * sinc(math.pi * a * d) * sinc(math.pi * a * c)


def kernel_K1(alpha, params: KernelParams):
    return sinc(math.pi * np.asarray(alpha, dtype=float) * params.need_delta()) ** 2


def kernel_K2pm(alpha, params: KernelParams, sign: int):
    c = _width(params, sign)
    return c * c * sinc(math.pi * np.asarray(alpha, dtype=float) * c) ** 2


def evaluate(kernel: str, alpha, params: KernelParams):
    if kernel == "K":
        return kernel_K(alpha, params.eta)
    if kernel == "K2":
        return kernel_K_double(alpha, params.eta)
    if kernel in ("Kplus", "Kminus"):
        return kernel_Kpm(alpha, params, 1 if kernel == "Kplus" else -1)
    if kernel == "K1":
        return kernel_K1(alpha, params)
    if kernel in ("K2plus", "K2minus"):
        return kernel_K2pm(alpha, params, 1 if kernel == "K2plus" else -1)
    raise ValueError(f"unknown kernel {kernel!r}; choose from {KERNELS}")


def cosine_terms(kernel: str, params: KernelParams) -> list[tuple[float, float]]:
    """(a_j, b_j) with kernel(alpha) = sum a_j cos(2 pi b_j alpha) / alpha^2 for alpha != 0."""
    pi2 = math.pi**2
    eta = params.eta
    if kernel == "K":
        a = 1 / (2 * pi2 * eta)
        return [(a, 0.0), (-a, eta)]
    if kernel == "K2":
        a = 1 / (8 * pi2 * eta)
        return [(a, 0.0), (-a, 2 * eta)]
    if kernel in ("Kplus", "Kminus"):
        d = params.need_delta()
        c = _width(params, 1 if kernel == "Kplus" else -1)
        a = 1 / (2 * pi2 * d)
        return [(a, abs(c - d) / 2), (-a, (c + d) / 2)]
    if kernel == "K1":
        d = params.need_delta()
        a = 1 / (2 * pi2 * d * d)
        return [(a, 0.0), (-a, d)]
    if kernel in ("K2plus", "K2minus"):
        c = _width(params, 1 if kernel == "K2plus" else -1)
        a = 1 / (2 * pi2)
        return [(a, 0.0), (-a, c)]
    raise ValueError(f"unknown kernel {kernel!r}")


def _cos_over_sq_tail(c: float, R: float) -> float:
    """Integral of cos(c*alpha)/alpha^2 over (R, inf)."""
    c = abs(c)
    if c == 0:
        return 1 / R
    si, _ = sici(c * R)
    return math.cos(c * R) / R - c * (math.pi / 2 - si)


@lru_cache(maxsize=8)
def gauss_legendre(n: int):
    x, w = roots_legendre(n)
    return x, w


@dataclass(frozen=True)
class FourierValue:
    value: float
    error: float

    def __float__(self):
        return self.value


def panel_quadrature(fn, edges: np.ndarray, orders=(24, 32), chunk: int = 20000):
    """Sum of Gauss-Legendre rules over consecutive panels, with an error estimate.

    The estimate is the absolute difference of the two orders plus a rounding
    allowance; panels are assumed short enough that both rules are resolved.
    """
    lo_order, hi_order = orders
    results = []
    scale = 0.0
    for n in (lo_order, hi_order):
        x, w = gauss_legendre(n)
        total = []
        for start in range(0, len(edges) - 1, chunk):
            a = edges[start:start + chunk + 1]
            left, right = a[:-1], a[1:]
            half = (right - left) / 2
            nodes = (left + half)[:, None] + half[:, None] * x[None, :]
            vals = fn(nodes)
            part = (vals * w[None, :]).sum(axis=1) * half
            total.append(part)
            scale += float(np.abs(vals).max(initial=0.0) * (right - left).sum())
        results.append(np.concatenate(total) if total else np.zeros(0))
    value = math.fsum(results[1].real) + (1j * math.fsum(results[1].imag) if np.iscomplexobj(results[1]) else 0)
    diff = float(np.abs(results[1] - results[0]).sum())
    return value, diff + 1e-15 * scale


def kernel_fourier(t: float, kernel: str, params: KernelParams, R: float | None = None,
                   tol: float = 1e-8) -> FourierValue:
    """Integral over the real line of e(alpha*t) * kernel(alpha).

    The range [-R, R] is integrated numerically; the remainder is added in
    closed form through the sine and cosine integrals.
    """
    terms = cosine_terms(kernel, params)
    freqs = [abs(t) + b for _, b in terms]
    fmax = max(freqs)
    positive = [b for _, b in terms if b > 0]
    if R is None:
        R = 64 / min(positive)
    # quarter-period panels for the fastest oscillation cos(2 pi (|t| + b) alpha)
    width = 1 / (4 * fmax) if fmax > 0 else R
    n_panels = max(1, math.ceil(R / width))
    edges = np.linspace(0.0, R, n_panels + 1)

    def integrand(a):
        return np.cos(2 * math.pi * t * a) * evaluate(kernel, a, params)

    head, qerr = panel_quadrature(integrand, edges)
    # cos(2 pi t a) cos(2 pi b a) = (cos(2 pi (t+b) a) + cos(2 pi (t-b) a)) / 2
    tail = 0.0
    for a_j, b_j in terms:
        tail += a_j / 2 * (_cos_over_sq_tail(2 * math.pi * (t + b_j), R)
                           + _cos_over_sq_tail(2 * math.pi * (t - b_j), R))
    tail_err = 1e-14 * sum(abs(a_j) for a_j, _ in terms) * (1 / R + 2 * math.pi * fmax)
    value = 2 * (head + tail)
    error = 2 * (qerr + tail_err)
    if not error <= tol:
        raise QuadratureError(f"Fourier quadrature error {error:.3g} exceeds tolerance {tol:.3g}")
    return FourierValue(float(value), error)


def fourier_closed_form(t, kernel: str, params: KernelParams):
    """Known transforms: triangles for K-type kernels, trapezoids for K+ and K-.

    Used as the weights of the count that a representation integral converges to.
    """
    t = np.abs(np.asarray(t, dtype=float))
    eta = params.eta
    if kernel == "K":
        return np.maximum(0.0, 1 - t / eta)
    if kernel == "K2":
        return np.maximum(0.0, 2 - t / eta) / 4
    if kernel in ("Kplus", "Kminus"):
        d = params.need_delta()
        c = _width(params, 1 if kernel == "Kplus" else -1)
        # overlap of [-d/2, d/2] with [t - c/2, t + c/2], divided by d
        overlap = np.minimum(d / 2, t + c / 2) - np.maximum(-d / 2, t - c / 2)
        return np.maximum(0.0, overlap) / d
    if kernel == "K1":
        d = params.need_delta()
        return np.maximum(0.0, 1 - t / d) / d
    if kernel in ("K2plus", "K2minus"):
        c = _width(params, 1 if kernel == "K2plus" else -1)
        return np.maximum(0.0, 1 - t / c) * c
    raise ValueError(f"unknown kernel {kernel!r}")
