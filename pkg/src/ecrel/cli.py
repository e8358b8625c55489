"""Command line front end.

Floats are printed with ``%.6e``; exact results print as ``p/q`` followed by
the decimal value. Exit status is 0 on success, 1 for usage errors and 2 for
domain or guard errors.
"""

from __future__ import annotations

import argparse
import csv
import sys
from fractions import Fraction

import numpy as np

from ecrel.avoidance import (
    avoidance_loss_upper,
    error_polynomial,
    multiplicative_gap,
    poisson_avoidance_upper,
)
from ecrel.code import CodeParams
from ecrel.distributions import (
    Constant,
    Exponential,
    Weibull,
    compute_G,
    limiting_loss,
    parse_distribution,
    rate_convention_convert,
    worst_case_constant_repair,
)
from ecrel.errors import ReliabilityError
from ecrel.exact import asymptotic_loss, chen_estimate, exact_loss, poisson_asymptotic
from ecrel.simulator import SimConfig, simulate

EXIT_USAGE = 1
EXIT_DOMAIN = 2

# (n, k, t, shape_fail, shape_rep, mean_fail, mean_rep)
TABLE1_ROWS = (
    (4, 2, 1.0, 1.5, 2.0, 0.1, 0.001),
    (4, 2, 1.0, 0.75, 2.0, 0.1, 0.001),
    (4, 2, 1.0, 0.75, 0.75, 0.1, 0.001),
    (4, 2, 1.0, 0.75, 0.75, 0.1, 1e-6),
    (8, 5, 1.0, 0.75, 1.25, 0.001, 1e-6),
    (8, 5, 1.0, 2.0, 2.0, 0.01, 0.001),
    (8, 5, 1.0, 0.5, 2.0, 0.01, 1e-6),
)

SWEEP_PARAMS = ("lambda", "kappa_f", "kappa_r", "t_rep")
SWEEP_METHODS = ("g", "limit", "worst", "chen", "sim")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def fmt(x: float) -> str:
    return "%.6e" % x


def _emit(out, name: str, value: str) -> None:
    out.write(f"{name} {value}\n")


def _exact_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator} {fmt(float(q))}"


def _rational(text: str) -> Fraction:
    try:
        q = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None
    return q


def _counts(text: str) -> tuple[int, ...]:
    try:
        m = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if any(x < 0 for x in m):
        raise argparse.ArgumentTypeError("failure counts must be nonnegative")
    return m


def _distribution(text: str):
    try:
        return parse_distribution(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _code(args) -> CodeParams:
    try:
        return CodeParams(args.n, args.k)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_g(args, out) -> None:
    res = compute_G(args.fail, args.rep, args.tol)
    _emit(out, "g", fmt(res.g))
    _emit(out, "abs_error", fmt(res.abs_error))
    _emit(out, "method", res.method)


def cmd_exact(args, out) -> None:
    code = _code(args)
    if len(args.m) != code.n:
        raise UsageError(f"--m needs {code.n} counts, got {len(args.m)}")
    if (args.rho is None) == (args.tau is None):
        raise UsageError("give exactly one of --rho or --tau")
    _emit(out, "exact", _exact_str(exact_loss(code, args.m, rho=args.rho, tau=args.tau)))


def cmd_asym(args, out) -> None:
    code = _code(args)
    if args.m is not None:
        if len(args.m) != code.n:
            raise UsageError(f"--m needs {code.n} counts, got {len(args.m)}")
        _emit(out, "asym", str(asymptotic_loss(code, args.m)))
    if args.lam is not None:
        if args.t is None:
            raise UsageError("--lambda needs --t")
        _emit(out, "poisson_asym", fmt(poisson_asymptotic(code, args.lam, args.t)))
    if args.m is None and args.lam is None:
        raise UsageError("give --m, or --lambda with --t")


def cmd_limit(args, out) -> None:
    code = _code(args)
    res = compute_G(args.fail, args.rep, args.tol)
    _emit(out, "g", fmt(res.g))
    _emit(out, "limit", fmt(limiting_loss(code, args.fail, args.rep, args.t, tol=args.tol)))


def cmd_bound(args, out) -> None:
    code = _code(args)
    if args.m is not None:
        if args.rho is None:
            raise UsageError("--m needs --rho")
        if len(args.m) != code.n:
            raise UsageError(f"--m needs {code.n} counts, got {len(args.m)}")
        _emit(out, "error_polynomial", str(error_polynomial(code)))
        _emit(out, "bound", fmt(avoidance_loss_upper(code, args.m, args.rho)))
        return
    if args.lam is None or args.t is None or args.trep is None:
        raise UsageError("give --m with --rho, or --lambda, --t and --trep")
    _emit(out, "bound", fmt(poisson_avoidance_upper(code, args.lam, args.t, args.trep)))
    _emit(out, "gap", fmt(multiplicative_gap(code, args.lam * args.t)))


def cmd_chen(args, out) -> None:
    code = _code(args)
    est = chen_estimate(code, args.lam, args.trep, args.t)
    _emit(out, "mttdl", fmt(est.mttdl))
    _emit(out, "p_loss", fmt(est.p_loss))


def _csv_writer(out):
    return csv.writer(out, lineterminator="\n")


def cmd_table1(args, out) -> None:
    rows = TABLE1_ROWS
    if args.rows is not None:
        try:
            rows = tuple(TABLE1_ROWS[int(i) - 1] for i in args.rows.split(","))
        except (ValueError, IndexError):
            raise UsageError(f"--rows takes indices 1..{len(TABLE1_ROWS)}") from None
    w = _csv_writer(out)
    w.writerow(["n", "k", "t", "kappa_f", "kappa_r", "mean_fail", "mean_rep", "g", "limit", "sim", "sim_stderr"])
    for i, (n, k, t, kf, kr, mf, mr) in enumerate(rows):
        code = CodeParams(n, k)
        fail, rep = Weibull.from_mean(kf, mf), Weibull.from_mean(kr, mr)
        g = compute_G(fail, rep).g
        lim = limiting_loss(code, fail, rep, t)
        if not args.no_sim:
            est = simulate(SimConfig(code, t, args.trials, args.seed + i, fail=fail, rep=rep))
            sim, se = fmt(est.p_hat), fmt(est.std_error)
        else:
            sim = se = ""
        w.writerow([n, k, repr(t), repr(kf), repr(kr), repr(mf), repr(mr), fmt(g), fmt(lim), sim, se])


def _sweep_laws(param: str, value: float, code: CodeParams, fail, rep):
    if param == "lambda":
        return rate_convention_convert(code.n, Exponential(value)), rep
    if param == "kappa_f":
        return Weibull.from_mean(value, fail.mean()), rep
    if param == "kappa_r":
        return fail, Weibull.from_mean(value, rep.mean())
    if isinstance(rep, Exponential):
        return fail, Exponential(1.0 / value)
    if isinstance(rep, Weibull):
        return fail, Weibull.from_mean(rep.shape, value)
    return fail, Constant(value)


def cmd_sweep(args, out) -> None:
    code = _code(args)
    methods = tuple(args.methods.split(","))
    bad = [m for m in methods if m not in SWEEP_METHODS]
    if bad:
        raise UsageError(f"unknown method(s) {', '.join(bad)}; choose from {', '.join(SWEEP_METHODS)}")
    if args.param != "lambda" and args.fail is None:
        raise UsageError(f"--param {args.param} needs --fail")
    if args.rep is None:
        raise UsageError("--rep is required")
    if args.steps < 1:
        raise UsageError("--steps must be >= 1")
    if "sim" in methods and not args.trials:
        raise UsageError("method sim needs --trials >= 1")
    grid = (
        np.geomspace(args.start, args.stop, args.steps)
        if args.log
        else np.linspace(args.start, args.stop, args.steps)
    )
    handle = open(args.out, "w", newline="", encoding="utf-8") if args.out else out
    try:
        w = _csv_writer(handle)
        w.writerow(["param", "method", "value", "stderr"])
        for i, v in enumerate(float(x) for x in grid):
            fail, rep = _sweep_laws(args.param, v, code, args.fail, args.rep)
            for method in methods:
                if method == "g":
                    w.writerow([repr(v), method, fmt(compute_G(fail, rep).g), ""])
                elif method == "limit":
                    w.writerow([repr(v), method, fmt(limiting_loss(code, fail, rep, args.t)), ""])
                elif method == "worst":
                    val = worst_case_constant_repair(code, fail, rep.mean(), args.t)
                    w.writerow([repr(v), method, fmt(val), ""])
                elif method == "chen":
                    if not isinstance(fail, Exponential):
                        raise UsageError("method chen needs exponential failures")
                    est = chen_estimate(code, fail.rate / code.n, rep.mean(), args.t)
                    w.writerow([repr(v), method, fmt(est.p_loss), ""])
                else:
                    cfg = SimConfig(code, args.t, args.trials, args.seed + i, fail=fail, rep=rep)
                    est = simulate(cfg)
                    w.writerow([repr(v), method, fmt(est.p_hat), fmt(est.std_error)])
    finally:
        if handle is not out:
            handle.close()


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ecrel", description="Data loss probability of erasure-coded storage.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def code_args(sp):
        sp.add_argument("--n", type=int, required=True, help="number of disks")
        sp.add_argument("--k", type=int, required=True, help="disks needed to recover")

    sp = sub.add_parser("g", help="G = P(Y < Z)")
    sp.add_argument("--fail", type=_distribution, required=True)
    sp.add_argument("--rep", type=_distribution, required=True)
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.set_defaults(func=cmd_g)

    sp = sub.add_parser("exact", help="exact loss probability given failure counts")
    code_args(sp)
    sp.add_argument("--m", type=_counts, required=True, help="per-disk failure counts, e.g. 1,1,1,1")
    sp.add_argument("--rho", type=_rational, help="t / t_rep")
    sp.add_argument("--tau", type=_rational, help="t_rep / t")
    sp.set_defaults(func=cmd_exact)

    sp = sub.add_parser("asym", help="small-t_rep asymptotic coefficients")
    code_args(sp)
    sp.add_argument("--m", type=_counts)
    sp.add_argument("--lambda", dest="lam", type=float, help="per-disk Poisson rate")
    sp.add_argument("--t", type=float)
    sp.set_defaults(func=cmd_asym)

    sp = sub.add_parser("limit", help="limiting loss for general laws")
    code_args(sp)
    sp.add_argument("--fail", type=_distribution, required=True, help="system inter-failure law")
    sp.add_argument("--rep", type=_distribution, required=True)
    sp.add_argument("--t", type=float, required=True)
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.set_defaults(func=cmd_limit)

    sp = sub.add_parser("bound", help="set-avoidance upper bounds")
    code_args(sp)
    sp.add_argument("--m", type=_counts)
    sp.add_argument("--rho", type=_rational)
    sp.add_argument("--lambda", dest="lam", type=float, help="per-disk Poisson rate")
    sp.add_argument("--t", type=float)
    sp.add_argument("--trep", type=float)
    sp.set_defaults(func=cmd_bound)

    sp = sub.add_parser("chen", help="Markov-chain MTTDL and first-order loss")
    code_args(sp)
    sp.add_argument("--lambda", dest="lam", type=float, required=True, help="per-disk rate")
    sp.add_argument("--trep", type=float, required=True)
    sp.add_argument("--t", type=float, required=True)
    sp.set_defaults(func=cmd_chen)

    sp = sub.add_parser("table1", help="Weibull validation table as CSV")
    sp.add_argument("--trials", type=_positive_int, default=10**6)
    sp.add_argument("--no-sim", action="store_true", help="formula columns only")
    sp.add_argument("--seed", type=int, default=1)
    sp.add_argument("--rows", help="comma-separated 1-based row indices")
    sp.set_defaults(func=cmd_table1)

    sp = sub.add_parser("sweep", help="parameter sweep as CSV")
    code_args(sp)
    sp.add_argument("--param", choices=SWEEP_PARAMS, required=True)
    sp.add_argument("--from", dest="start", type=float, required=True)
    sp.add_argument("--to", dest="stop", type=float, required=True)
    sp.add_argument("--steps", type=int, required=True)
    sp.add_argument("--log", action="store_true", help="geometric grid")
    sp.add_argument("--t", type=float, default=1.0)
    sp.add_argument("--fail", type=_distribution)
    sp.add_argument("--rep", type=_distribution)
    sp.add_argument("--methods", default="limit")
    sp.add_argument("--trials", type=int, default=0)
    sp.add_argument("--seed", type=int, default=1)
    sp.add_argument("--out", help="output path (default stdout)")
    sp.set_defaults(func=cmd_sweep)
    return p


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else 0
    try:
        args.func(args, out)
    except UsageError as exc:
        err.write(f"ecrel: error: {exc}\n")
        return EXIT_USAGE
    except (ReliabilityError, ValueError, TypeError) as exc:
        err.write(f"ecrel: {type(exc).__name__}: {exc}\n")
        return EXIT_DOMAIN
    return 0


if __name__ == "__main__":
    sys.exit(main())
