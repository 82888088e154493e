"""Command-line entry point.

Exit codes: 0 success, 1 usage or parse error, 2 undecidable at the working
precision (including quadrature that misses its error target), 3 budget
exceeded.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .core import (
    BudgetExceededError,
    CubicSystem,
    ExactReal,
    ParseError,
    QuadratureError,
    SearchBox,
    ShiftedCubeForm,
    UndecidableError,
    Window,
    load_form,
    parse_exact,
)

DIGITS = 30


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _num(text: str) -> ExactReal:
    return parse_exact(text)


def _dec(value, digits: int = DIGITS) -> str:
    return ExactReal.coerce(value).to_decimal_string(digits)


def _frac(value) -> dict:
    """Exact rational as a decimal string plus numerator/denominator."""
    f = Fraction(value)
    return {"decimal": _dec(f), "num": str(f.numerator), "den": str(f.denominator)}


def _threads() -> int:
    raw = os.environ.get("CUBESHIFT_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"CUBESHIFT_THREADS={raw!r} is not an integer") from None
    if n < 1:
        raise UsageError("CUBESHIFT_THREADS must be positive")
    return n


def _write_csv(out, header, rows) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)


def _emit(args, payload: dict, header=None, rows=None) -> None:
    if args.format == "csv" and header is not None:
        _write_csv(sys.stdout, header, rows)
    else:
        json.dump(payload, sys.stdout, indent=2)
        sys.stdout.write("\n")


def _shifted(form) -> ShiftedCubeForm:
    if not isinstance(form, ShiftedCubeForm):
        raise UsageError("this command needs a form with 'shifts'")
    return form


# -- subcommands ---------------------------------------------------------------

def cmd_solve(args) -> int:
    from .solver import brute_force_solve, derived_box, mitm_solve

    form = load_form(args.form)
    w = Window(_num(args.tau), _num(args.eta))
    if args.box:
        box = SearchBox.parse(args.box)
    else:
        box = derived_box(_shifted(form), w.upper)
    if box is None:
        sols = []
    else:
        box.check_for_form(form)
        sols = (brute_force_solve(form, w, box) if args.method == "brute"
                else mitm_solve(form, w, box, emit="enumerate"))
    payload = {
        "count": len(sols),
        "precision": DIGITS,
        "box": [list(r) for r in box.ranges] if box else None,
        "solutions": [{"x": list(r.x), "value": _dec(r.value), "deviation": _dec(r.deviation)}
                      for r in sols],
    }
    rows = [[" ".join(map(str, r.x)), _dec(r.value), _dec(r.deviation)] for r in sols]
    _emit(args, payload, ["x", "value", "deviation"], rows)
    return 0


def cmd_count(args) -> int:
    from .solver import asymptotic_main_term, count_window, histogram_count

    form = _shifted(load_form(args.form))
    w = Window(_num(args.tau), _num(args.eta))
    payload: dict = {"s": form.s}
    if args.method == "histogram":
        width = _num(args.bin_width) if args.bin_width else w.eta / 4
        br = histogram_count(form, w, width)
        payload.update(lower=br.lower, upper=br.upper, bin_width=_frac(br.bin_width))
        row = [br.lower, br.upper]
    else:
        n = count_window(form, w)
        payload["count"] = n
        row = [n, n]
    if args.main_term:
        mt = asymptotic_main_term(form.s, float(w.eta), float(w.tau))
        payload["main_term"] = mt
        if form.s < 9:
            payload["note"] = "s below 9: the main term is a heuristic comparison only"
    _emit(args, payload, ["lower", "upper"], [row])
    return 0


def cmd_density(args) -> int:
    from .density import density_profile, represented_set

    form = _shifted(load_form(args.form))
    try:
        A_text, B_text = args.range.split(":")
    except ValueError:
        raise ParseError(f"malformed range {args.range!r}, expected A:B") from None
    A, B = _num(A_text), _num(B_text)
    eta = _num(args.eta)
    header = ["prefix", "represented_measure", "unrepresented_measure", "fraction"]
    rows = []
    summary: dict = {"eta": _dec(eta), "precision": DIGITS}
    if args.profile:
        if not A.is_zero():
            raise UsageError("--profile needs a range starting at 0")
        prof = density_profile(form, B.as_fraction(), eta, args.profile)
        for (Nk, frac), err in zip(prof.rows, prof.errors):
            unrep = frac * Nk
            rows.append([_dec(Nk), _dec(Nk - unrep), _dec(unrep), _dec(frac)])
        summary.update(N=_dec(prof.N), truncated=prof.truncated,
                       fraction_error=[float(e) for e in prof.errors])
    else:
        rep = represented_set(form, A, B, eta)
        meas = rep.measure()
        total = (B - A)
        unrep = total - meas
        rows.append([_dec(B), _dec(meas), _dec(unrep), _dec(unrep / total)])
        summary.update(intervals=len(rep), measure_error=float(rep.error), windows=rep.n_source)
    if args.format == "csv":
        _write_csv(sys.stdout, header, rows)
        if args.summary:
            with open(args.summary, "w") as fh:
                json.dump(summary, fh, indent=2)
    else:
        summary["rows"] = [dict(zip(header, r)) for r in rows]
        json.dump(summary, sys.stdout, indent=2)
        sys.stdout.write("\n")
    return 0


def _system_polys(path):
    system = load_form(path)
    if not isinstance(system, CubicSystem):
        raise UsageError("this command needs a form with 'polys'")
    return system.polys


def cmd_moments(args) -> int:
    from .solver import MomentRanges, count_S4_general, count_S4_shifted, diagonal_only_check

    P = _num(args.P).as_fraction()
    eta = _num(args.eta)
    payload: dict = {"kind": args.kind, "P": str(P)}
    if args.kind == "shifted":
        if args.mu1 is None or args.mu2 is None:
            raise UsageError("shifted moments need --mu1 and --mu2")
        n = count_S4_shifted(args.mu1, args.mu2, P, eta)
        payload.update(count=n, diagonal=MomentRanges(P).diagonal_count)
    elif args.kind == "general":
        polys = _system_polys(args.system)
        if len(polys) < 2:
            raise UsageError("general moments need two polynomials")
        c = _num(args.c).as_fraction()
        n = count_S4_general(polys[0], polys[1], c, P, eta)
        payload.update(count=n, diagonal=MomentRanges(P, c, Fraction(4, 5)).diagonal_count)
    else:
        polys = _system_polys(args.system)
        payload["diagonal_only"] = diagonal_only_check(polys[0], P, eta)
    _emit(args, payload)
    return 0


def cmd_kernels(args) -> int:
    from .circle.kernels import KERNELS, KernelParams, U, evaluate, fourier_closed_form, kernel_fourier

    eta = float(_num(args.eta))
    delta = float(_num(args.delta)) if args.delta else None
    params = KernelParams(eta, delta)
    kernels = [args.kernel] if args.kernel else (["K", "K2"] + (["Kplus", "Kminus"] if delta else []))
    for k in kernels:
        if k not in KERNELS:
            raise UsageError(f"unknown kernel {k!r}")
    n = args.grid
    if args.check_fourier:
        ts = np.linspace(-3 * eta, 3 * eta, n)
        header = ["kernel", "t", "computed", "expected", "abs_diff", "error_bound", "indicator"]
        rows = []
        for k in kernels:
            for t in ts:
                fv = kernel_fourier(float(t), k, params)
                exp = float(fourier_closed_form(t, k, params))
                rows.append([k, repr(float(t)), repr(fv.value), repr(exp), repr(abs(fv.value - exp)),
                             repr(fv.error), repr(float(U(t, eta)))])
    else:
        alphas = np.linspace(-args.alpha_max, args.alpha_max, n)
        header = ["kernel", "alpha", "value"]
        rows = [[k, repr(float(a)), repr(float(evaluate(k, a, params)))] for k in kernels for a in alphas]
    payload = {"rows": [dict(zip(header, r)) for r in rows]}
    _emit(args, payload, header, rows)
    return 0


def cmd_weyl(args) -> int:
    from .circle.sums import weyl_sum, weyl_sum_terms

    alpha, mu, X = _num(args.alpha), _num(args.mu), _num(args.X)
    v = weyl_sum(args.j, alpha, mu, X)
    n = weyl_sum_terms(args.j, X)
    # per term: phase within 2^-90 turns, plus cos/sin rounding
    bound = n * 2.0**-50
    row = [args.alpha, args.mu, args.X, repr(v.real), repr(v.imag), repr(abs(v)), repr(bound)]
    header = ["alpha", "mu", "X", "re", "im", "abs", "error_bound"]
    _emit(args, dict(zip(header, row)) | {"terms": n}, header, [row])
    return 0


def cmd_arcs(args) -> int:
    from .circle.arcs import ArcParams, classify_arc, classify_classical, dirichlet_approx

    alpha = _num(args.alpha)
    P = float(_num(args.P))
    arcs = ArcParams(P, float(_num(args.xi)), float(_num(args.T)) if args.T else None)
    cls = classify_classical(alpha, _num(args.P))
    Q = _num(args.Q).as_fraction() if args.Q else Fraction(P**1.5)
    da = dirichlet_approx(alpha, Q)
    payload = {
        "alpha": args.alpha,
        "arc": classify_arc(alpha, arcs),
        "major_radius": arcs.major_radius,
        "T": arcs.T,
        "classical": {"in_major": cls.in_major, "q": cls.q, "a": cls.a, "err": cls.err},
        "dirichlet": {"Q": float(Q), "a": da.a, "q": da.q, "err": da.err},
    }
    row = [args.alpha, payload["arc"], cls.in_major, cls.q, cls.a, da.a, da.q, repr(da.err)]
    _emit(args, payload, ["alpha", "arc", "classical_major", "q", "a", "dirichlet_a", "dirichlet_q", "dirichlet_err"], [row])
    return 0


def cmd_reduce(args) -> int:
    from .reduction import check_irrationality_poly, choose_reduction, quadratic_dense_search, reduce_six_cubes

    form = _shifted(load_form(args.shifts))
    shifts = form.shifts
    if args.a:
        cert = reduce_six_cubes(shifts, args.a)
        verdict = check_irrationality_poly(cert.quadratic)
        certs = [cert]
    else:
        choice = choose_reduction(shifts)
        verdict = choice.verdict
        cert = choice.chosen
        certs = list(choice.certificates)
    out = []
    for c in certs:
        out.append({"a": c.a, "c": [_dec(v) for v in c.c_vec], "f_a": _dec(c.f_a),
                    "quadratic": c.quadratic.to_json(DIGITS)})
    payload: dict = {"verdict": verdict.value, "precision": DIGITS,
                     "a": cert.a if cert else None, "certificates": out}
    if args.search:
        if cert is None:
            raise UsageError("no certified reduction to search; pass --a explicitly")
        if args.target is None or args.eta is None:
            raise UsageError("--search needs --target and --eta")
        res = quadratic_dense_search(cert.quadratic, _num(args.target), _num(args.eta), args.radius)
        payload["witness"] = {"y": list(res.witness), "x": list(cert.substitute(cert.a, res.witness)),
                              "value": _dec(res.value), "deviation": _dec(res.deviation),
                              "achieved": res.achieved, "radius": res.radius}
    _emit(args, payload)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cubeshift", description="Shifted-cube inequalities: solvers, densities, circle-method checks.")
    p.add_argument("--version", action="version", version=f"cubeshift {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help_, fmt="json"):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--format", choices=("json", "csv"), default=fmt)
        sp.set_defaults(func=fn)
        return sp

    sp = add("solve", cmd_solve, "list solutions of |F(x) - tau| < eta")
    sp.add_argument("--form", required=True)
    sp.add_argument("--tau", required=True)
    sp.add_argument("--eta", required=True)
    sp.add_argument("--box", help="lo:hi,lo:hi,... (half-open (lo, hi])")
    sp.add_argument("--method", choices=("mitm", "brute"), default="mitm")

    sp = add("count", cmd_count, "count solutions, exactly or as a histogram bracket")
    sp.add_argument("--form", required=True)
    sp.add_argument("--tau", required=True)
    sp.add_argument("--eta", required=True)
    sp.add_argument("--method", choices=("exact", "histogram"), default="exact")
    sp.add_argument("--bin-width")
    sp.add_argument("--main-term", action="store_true")

    sp = add("density", cmd_density, "measure of represented and unrepresented targets", fmt="csv")
    sp.add_argument("--form", required=True)
    sp.add_argument("--eta", required=True)
    sp.add_argument("--range", required=True, help="A:B")
    sp.add_argument("--profile", type=int, help="number of geometric prefixes of [0, B]")
    sp.add_argument("--summary", help="write the JSON summary here (csv format)")

    sp = add("moments", cmd_moments, "fourth-moment counts and diagonal checks")
    sp.add_argument("--kind", choices=("shifted", "general", "diagonal"), default="shifted")
    sp.add_argument("--mu1")
    sp.add_argument("--mu2")
    sp.add_argument("--system", help="JSON with 'polys'")
    sp.add_argument("--c", default="2")
    sp.add_argument("--P", required=True)
    sp.add_argument("--eta", required=True)

    sp = add("kernels", cmd_kernels, "kernel values and Fourier checks", fmt="csv")
    sp.add_argument("--eta", required=True)
    sp.add_argument("--delta")
    sp.add_argument("--kernel")
    sp.add_argument("--check-fourier", action="store_true")
    sp.add_argument("--grid", type=int, default=25)
    sp.add_argument("--alpha-max", type=float, default=10.0)

    sp = add("weyl", cmd_weyl, "Weyl sum f_j(alpha, mu, X)", fmt="csv")
    sp.add_argument("--alpha", required=True)
    sp.add_argument("--mu", required=True)
    sp.add_argument("--X", required=True)
    sp.add_argument("--j", type=int, choices=(1, 2), default=1)

    sp = add("arcs", cmd_arcs, "arc classification and rational approximation")
    sp.add_argument("--alpha", required=True)
    sp.add_argument("--P", required=True)
    sp.add_argument("--xi", default="1/2")
    sp.add_argument("--T")
    sp.add_argument("--Q")

    sp = add("reduce", cmd_reduce, "six-cube reduction to a ternary quadratic")
    sp.add_argument("--shifts", required=True, help="JSON with six 'shifts'")
    sp.add_argument("--a", type=int, choices=(3, 4))
    sp.add_argument("--search", action="store_true")
    sp.add_argument("--target")
    sp.add_argument("--eta")
    sp.add_argument("--radius", type=int, default=200)
    return p


def run(argv=None) -> int:
    try:
        _threads()
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UndecidableError as exc:
        print(f"cubeshift: undecidable: {exc}", file=sys.stderr)
        return 2
    except QuadratureError as exc:
        print(f"cubeshift: quadrature: {exc}", file=sys.stderr)
        return 2
    except BudgetExceededError as exc:
        print(f"cubeshift: budget exceeded: {exc}", file=sys.stderr)
        return 3
    except (UsageError, ParseError, ValueError, TypeError, FileNotFoundError) as exc:
        print(f"cubeshift: error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
