"""Reduction of six shifted cubes to a ternary quadratic, and irrationality checks.

With x = (a + y1, y2, y3, -y1, -y2, -y3) the six-cube form becomes

    F(x) = f(a) + 3 v . c(a),   v = (y1^2, y1, y2^2, y2, y3^2, y3),

a quadratic polynomial in y with diagonal homogeneous part. Verdicts on
irrationality are exact for rational and surd data; decimals flagged as
irrational can only be decided in simple cases, otherwise the verdict is
UNKNOWN.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .core import (
    BudgetExceededError,
    CubicSystem,
    DecimalSpec,
    ExactReal,
    RealSpec,
    ShiftedCubeForm,
    SingularError,
    eval_form,
)
from .core.forms import _as_spec, _check_decimal, _coerce_real


class Verdict(str, Enum):
    HOLDS = "holds"
    FAILS = "fails"
    UNKNOWN = "unknown"


def _flagged(spec: RealSpec) -> bool:
    return isinstance(spec, DecimalSpec) and spec.declared_irrational


@dataclass(frozen=True)
class QuadraticPolynomial:
    """q(y) = y^T A y + b . y + c0 with exact entries.

    `certified` is False when some entry was derived from a decimal declared
    irrational, so its exact value is only a stand-in.
    """

    A: tuple[tuple[ExactReal, ...], ...]
    b: tuple[ExactReal, ...]
    c0: ExactReal
    certified: bool = True

    def __post_init__(self):
        A = tuple(tuple(_coerce_real(v) for v in row) for row in self.A)
        b = tuple(_coerce_real(v) for v in self.b)
        n = len(b)
        if n < 1 or len(A) != n or any(len(row) != n for row in A):
            raise ValueError("A must be n x n and b of length n, n >= 1")
        for i in range(n):
            for j in range(i):
                if A[i][j] != A[j][i]:
                    raise ValueError("A must be symmetric")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c0", _coerce_real(self.c0))

    @property
    def n(self) -> int:
        return len(self.b)

    def homogeneous(self, y: Sequence) -> ExactReal:
        total = ExactReal()
        for i in range(self.n):
            for j in range(self.n):
                if not self.A[i][j].is_zero():
                    total = total + self.A[i][j] * y[i] * y[j]
        return total

    def __call__(self, y: Sequence) -> ExactReal:
        if len(y) != self.n:
            raise ValueError(f"expected {self.n} coordinates")
        lin = ExactReal()
        for bi, yi in zip(self.b, y):
            lin = lin + bi * yi
        return self.homogeneous(y) + lin + self.c0

    def nonconstant_coefficients(self) -> list[ExactReal]:
        """Coefficients of the monomials y_i y_j (i <= j) and y_i."""
        out = []
        for i in range(self.n):
            out.append(self.A[i][i])
            for j in range(i + 1, self.n):
                out.append(2 * self.A[i][j])
        return out + list(self.b)

    def to_json(self, digits: int = 30) -> dict:
        def enc(v: ExactReal):
            return v.to_decimal_string(digits)

        return {"A": [[enc(v) for v in row] for row in self.A], "b": [enc(v) for v in self.b],
                "c0": enc(self.c0), "precision": digits, "certified": self.certified}


@dataclass(frozen=True)
class ReductionCertificate:
    a: int
    f_a: ExactReal
    c_vec: tuple[ExactReal, ...]
    quadratic: QuadraticPolynomial
    form: ShiftedCubeForm

    @staticmethod
    def substitute(a: int, y: Sequence[int]) -> tuple[int, ...]:
        y1, y2, y3 = y
        return (a + y1, y2, y3, -y1, -y2, -y3)

    def predicted(self, y: Sequence[int]) -> ExactReal:
        y1, y2, y3 = y
        v = (y1 * y1, y1, y2 * y2, y2, y3 * y3, y3)
        total = self.f_a
        for vi, ci in zip(v, self.c_vec):
            total = total + 3 * vi * ci
        return total

    def residual(self, y: Sequence[int]) -> ExactReal:
        """eval_form at the substituted x minus f(a) + 3 v.c(a); zero for exact data."""
        return eval_form(self.form, self.substitute(self.a, y)) - self.predicted(y)


def _check_normalised(specs: Sequence[RealSpec]) -> list[ExactReal]:
    vals = []
    for i, m in enumerate(specs):
        _check_decimal(m)
        v = m.exact()
        if not (v.sign() > 0 and v <= 1):
            raise ValueError(f"shift {i + 1} = {m.encode()} violates 0 < mu <= 1")
        vals.append(v)
    return vals


def reduce_six_cubes(shifts: Sequence, a: int) -> ReductionCertificate:
    """The substitution for a in {3, 4}; shifts must satisfy 0 < mu_i <= 1."""
    if a not in (3, 4):
        raise ValueError("a must be 3 or 4")
    specs = [_as_spec(m) for m in shifts]
    if len(specs) != 6:
        raise ValueError("need exactly six shifts")
    m1, m2, m3, m4, m5, m6 = _check_normalised(specs)
    A1 = a - m1
    c = (
        A1 - m4,
        A1 * A1 - m4 * m4,
        -m2 - m5,
        m2 * m2 - m5 * m5,
        -m3 - m6,
        m3 * m3 - m6 * m6,
    )
    f_a = A1**3 - m4**3 - m2**3 - m5**3 - m3**3 - m6**3
    zero = ExactReal()
    A = ((3 * c[0], zero, zero), (zero, 3 * c[2], zero), (zero, zero, 3 * c[4]))
    q = QuadraticPolynomial(A, (3 * c[1], 3 * c[3], 3 * c[5]), f_a,
                            certified=not any(_flagged(s) for s in specs))
    return ReductionCertificate(a, f_a, c, q, ShiftedCubeForm(tuple(specs)))


def _solve(A: Sequence[Sequence[ExactReal]], rhs: Sequence[ExactReal]) -> list[ExactReal]:
    """Exact Gaussian elimination with nonzero pivots."""
    n = len(rhs)
    M = [list(row) + [rhs[i]] for i, row in enumerate(A)]
    for col in range(n):
        piv = next((r for r in range(col, n) if not M[r][col].is_zero()), None)
        if piv is None:
            raise SingularError("homogeneous part is singular")
        M[col], M[piv] = M[piv], M[col]
        inv = M[col][col].inverse()
        for r in range(n):
            if r != col and not M[r][col].is_zero():
                f = M[r][col] * inv
                M[r] = [x - f * y for x, y in zip(M[r], M[col])]
    return [M[i][n] / M[i][i] for i in range(n)]


def complete_square(q: QuadraticPolynomial) -> tuple[tuple[ExactReal, ...], ExactReal]:
    """xi = A^{-1} b / 2 and the constant Q(xi) - q(0), so that Q(y + xi) = q(y) + constant."""
    xi = tuple(v / 2 for v in _solve(q.A, q.b))
    return xi, q.homogeneous(xi) - q.c0


def inertia(A: Sequence[Sequence]) -> tuple[int, int, int]:
    """(positive, negative, zero) counts of a symmetric matrix, by exact congruence."""
    M = [[_coerce_real(v) for v in row] for row in A]
    n = len(M)
    pos = neg = 0
    size = n
    while size:
        k = next((i for i in range(size) if not M[i][i].is_zero()), None)
        if k is None:
            pair = next(((i, j) for i in range(size) for j in range(i + 1, size)
                         if not M[i][j].is_zero()), None)
            if pair is None:
                break
            i, j = pair
            # row/column i += row/column j makes the diagonal 2*M[i][j] nonzero
            M[i] = [x + y for x, y in zip(M[i], M[j])]
            for r in range(size):
                M[r][i] = M[r][i] + M[r][j]
            k = i
        piv = M[k][k]
        if piv.sign() > 0:
            pos += 1
        else:
            neg += 1
        inv = piv.inverse()
        rest = [r for r in range(size) if r != k]
        M = [[M[r][c] - M[r][k] * M[k][c] * inv for c in rest] for r in rest]
        size -= 1
    return pos, neg, n - pos - neg


def _ratio_verdict(num: ExactReal, den: ExactReal) -> Verdict:
    """HOLDS when num/den is irrational."""
    return Verdict.FAILS if num.has_rational_ratio(den) else Verdict.HOLDS


def _pair_verdict(s1: RealSpec, s2: RealSpec) -> Verdict | None:
    """Verdict for the ratio s1/s2; None when s2 is zero."""
    f1, f2 = _flagged(s1), _flagged(s2)
    if not f2 and s2.exact().is_zero():
        return None
    if not (f1 or f2):
        return _ratio_verdict(s1.exact(), s2.exact())
    if f1 and f2:
        return Verdict.UNKNOWN
    other = s2 if f1 else s1
    if not other.certified_rational:
        return Verdict.UNKNOWN
    # irrational over nonzero rational, or 0 over irrational
    return Verdict.FAILS if other.exact().is_zero() else Verdict.HOLDS


def _combine(verdicts) -> Verdict:
    verdicts = list(verdicts)
    if Verdict.HOLDS in verdicts:
        return Verdict.HOLDS
    if Verdict.UNKNOWN in verdicts:
        return Verdict.UNKNOWN
    return Verdict.FAILS


def check_irrationality_pair(system: CubicSystem) -> Verdict:
    """Some ratio of two nonconstant coefficients, across all h_i, is irrational."""
    coeffs = [c for p in system.polys for c in p.coefficients[:3]]
    verdicts = []
    for s1, s2 in itertools.permutations(coeffs, 2):
        v = _pair_verdict(s1, s2)
        if v is not None:
            verdicts.append(v)
    return _combine(verdicts)


def check_irrationality_poly(q: QuadraticPolynomial) -> Verdict:
    """q(y) - q(0) is not a real multiple of a rational polynomial."""
    if not q.certified:
        return Verdict.UNKNOWN
    coeffs = [c for c in q.nonconstant_coefficients() if not c.is_zero()]
    if len(coeffs) < 2:
        return Verdict.FAILS
    return _combine(_ratio_verdict(c, coeffs[0]) for c in coeffs[1:])


@dataclass(frozen=True)
class ReductionChoice:
    verdict: Verdict
    chosen: ReductionCertificate | None
    certificates: tuple[ReductionCertificate, ...]


def choose_reduction(shifts: Sequence) -> ReductionChoice:
    """Try a = 3, then a = 4, returning the first certificate whose c(a) passes."""
    specs = [_as_spec(m) for m in shifts]
    mu1 = specs[0]
    if not (mu1.certified_irrational or _flagged(mu1)):
        raise ValueError("the first shift must be certified irrational")
    certs = []
    for a in (3, 4):
        cert = reduce_six_cubes(specs, a)
        verdict = check_irrationality_poly(cert.quadratic)
        if verdict is Verdict.HOLDS:
            return ReductionChoice(Verdict.HOLDS, cert, (cert,))
        certs.append((cert, verdict))
    verdict = _combine(v for _, v in certs)
    return ReductionChoice(verdict, None, tuple(c for c, _ in certs))


@dataclass(frozen=True)
class DenseSearchResult:
    value: ExactReal
    deviation: ExactReal
    witness: tuple[int, ...]
    achieved: bool
    radius: int  # max-norm of the witness


SEARCH_LIMIT = 10**9


def _shell(n: int, r: int) -> np.ndarray:
    """Integer points of max-norm exactly r, as disjoint faces."""
    if r == 0:
        return np.zeros((1, n), dtype=np.int64)
    full = np.arange(-r, r + 1)
    inner = np.arange(-r + 1, r)
    faces = []
    for i in range(n):
        axes = [inner] * i + [np.array([-r, r])] + [full] * (n - i - 1)
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)
        faces.append(grid)
    return np.concatenate(faces)


def quadratic_dense_search(q: QuadraticPolynomial, target, eta, radius: int) -> DenseSearchResult:
    """Nearest value of q to target over |y|_inf <= radius, by increasing shells.

    Stops after the first shell reaching |q(y) - target| < eta, so the witness
    has minimal max-norm. Ties go to the lexicographically smallest y.
    """
    if q.n > 4:
        raise ValueError("search supports at most 4 variables")
    if radius < 0 or radius > 1000:
        raise ValueError("radius must lie in [0, 1000]")
    if (2 * radius + 1) ** q.n > SEARCH_LIMIT:
        raise BudgetExceededError(f"box of radius {radius} exceeds {SEARCH_LIMIT} points")
    target, eta = _coerce_real(target), _coerce_real(eta)
    if eta.sign() <= 0:
        raise ValueError("eta must be positive")
    Af = np.array([[float(v) for v in row] for row in q.A])
    bf = np.array([float(v) for v in q.b])
    shift = float(q.c0 - target)
    best = None  # (deviation, witness, value)
    for r in range(radius + 1):
        pts = _shell(q.n, r)
        yf = pts.astype(float)
        vals = np.einsum("ki,ij,kj->k", yf, Af, yf) + yf @ bf + shift
        dev = np.abs(vals)
        scale = (np.abs(Af).sum() * r * r + np.abs(bf).sum() * r + abs(shift) + 1)
        slack = 64 * 2.0**-52 * scale
        lo = dev.min()
        cand = pts[dev <= lo + 2 * slack]
        for y in sorted(map(tuple, cand.tolist())):
            val = q(y)
            d = abs(val - target)
            if best is None or d < best[0] or (d == best[0] and y < best[1]):
                best = (d, y, val)
        if best[0] < eta:
            break
    d, y, val = best
    return DenseSearchResult(val, d, y, bool(d < eta), max((abs(v) for v in y), default=0))
