"""Command-line harness.

Subcommands::

    solve            run benchmarks, one statistics record per (problem, tol)
    table1           coefficient table for a list of stage counts
    dump-polynomial  stability and stage polynomials sampled on the real axis
    dump-region      |R_s(z)| on a rectangular grid of the complex plane
    fit-check        fitted stage-count model against the true minimal s
    make-reference   regenerate stored reference solutions

Exit codes: 0 success, 2 bad arguments, 3 solver abort.
"""

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .driver import (
    FIT_A,
    FIT_B,
    FIT_C,
    SolverAbort,
    SolverConfig,
    integrate,
    select_stage_count,
)
from .problems import PROBLEMS, euclidean_error, generate_reference, make_problem
from .tableau import (
    eval_stability,
    get_tableau,
    rkc2_reference_polynomial,
    stability_region_grid,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_ABORT = 3

TABLE1_STAGES = (3, 5, 10, 20, 50, 100, 200, 500, 1000, 2000)

# power law rho_s ~ K (s + S0)^P, the inverse direction of the stage fit
INV_FIT_K = 0.31
INV_FIT_S0 = 0.83
INV_FIT_P = 1.87


class UsageError(Exception):
    pass


@dataclass
class RunRecord:
    problem: str
    method: str
    tol: float
    err: float
    n_f: int
    n_accepted: int
    n_rejected: int
    elapsed_ms: float


def _fmt(v):
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else "nan"
    return str(v)


# -- solve ----------------------------------------------------------------------

def run_one(name, tol, atol=None, rho_mode="auto", h_init=None):
    """Integrate one benchmark and return its :class:`RunRecord`.

    ``err`` is NaN when the problem has no reference solution.
    """
    problem = make_problem(name)
    use_bound = rho_mode != "power"
    if rho_mode == "analytic" and problem.rho_bound is None:
        raise UsageError(f"problem {name!r} has no analytic spectral radius bound")
    cfg = SolverConfig(atol=tol if atol is None else atol, rtol=tol,
                       h_init=h_init, use_rho_bound=use_bound)
    rep = integrate(None, problem, cfg)
    err = (euclidean_error(rep.y_final, problem.reference)
           if problem.reference is not None else float("nan"))
    return RunRecord(problem.name, "mono", tol, err, rep.n_f, rep.n_accepted,
                     rep.n_rejected, rep.elapsed * 1e3)


def write_records(records, fmt, out):
    fields = list(RunRecord.__dataclass_fields__)
    if fmt == "json":
        json.dump([asdict(r) for r in records], out, indent=2, allow_nan=True)
        out.write("\n")
    elif fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(fields)
        for r in records:
            w.writerow([_fmt(getattr(r, k)) for k in fields])
    else:
        head = f"{'problem':<14}{'method':<7}{'tol':>9}{'err':>12}{'n_f':>9}{'accpt':>8}{'rejct':>7}{'ms':>10}"
        out.write(head + "\n")
        for r in records:
            out.write(f"{r.problem:<14}{r.method:<7}{r.tol:>9.1e}{r.err:>12.3e}"
                      f"{r.n_f:>9d}{r.n_accepted:>8d}{r.n_rejected:>7d}"
                      f"{r.elapsed_ms:>10.1f}\n")


def cmd_solve(args, out):
    for t in args.tol:
        if not t > 0:
            raise UsageError(f"tolerance must be positive, got {t}")
    if args.atol is not None and not args.atol > 0:
        raise UsageError("--atol must be positive")
    names = [n.lower() for n in args.problem]
    for n in names:
        if n not in PROBLEMS:
            raise UsageError(f"unknown problem {n!r}; choose from {', '.join(PROBLEMS)}")
    jobs = [(n, t) for n in names for t in args.tol]

    def work(job):
        return run_one(job[0], job[1], args.atol, args.rho, args.seed_h)

    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            records = list(pool.map(work, jobs))  # map keeps input order
    else:
        records = [work(j) for j in jobs]
    write_records(records, args.format, out)
    return EXIT_OK


# -- tables and plot data ---------------------------------------------------------

def table1_rows(stages):
    rows = []
    for s in stages:
        tab = get_tableau(s)
        rows.append((s, tab.rho, tab.err_const, tab.w0, tab.w1, tab.b[s - 1],
                     tab.gamma_s, -tab.delta_s))
    return rows


def cmd_table1(args, out):
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["s", "rho", "C", "w0", "w1", "b_s-1", "gamma", "-delta"])
    for row in table1_rows(args.stages):
        w.writerow([row[0]] + [f"{v:.8g}" for v in row[1:]])
    return EXIT_OK


def cmd_dump_polynomial(args, out):
    s, m = args.stages, args.points
    if s < 3 or m < 2:
        raise UsageError("need --stages >= 3 and --points >= 2")
    tab = get_tableau(s)
    x = np.linspace(-1.05 * tab.rho, 0.0, m)
    smp = eval_stability(tab, x)
    cols = [x, smp.R] + list(smp.internal)
    header = ["x", "R"] + [f"Rt{j}" for j in range(s + 1)]
    if args.compare_rkc:
        cols.append(rkc2_reference_polynomial(s, x))
        header.append("rkc2")
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for row in zip(*cols):
        w.writerow([repr(float(v)) for v in row])
    return EXIT_OK


def _range(text):
    try:
        lo, hi = (float(t) for t in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A:B, got {text!r}")
    if not lo < hi:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return lo, hi


def cmd_dump_region(args, out):
    if args.stages < 3 or args.nx < 2 or args.ny < 2:
        raise UsageError("need --stages >= 3, --nx >= 2 and --ny >= 2")
    re, im, val = stability_region_grid(get_tableau(args.stages), args.re, args.im,
                                        args.nx, args.ny)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["im\\re"] + [repr(float(v)) for v in re])
    for k in range(len(im)):
        w.writerow([repr(float(im[k]))] + [repr(float(v)) for v in val[k]])
    return EXIT_OK


def fit_rows(stages=TABLE1_STAGES):
    """``(s, rho_s, fitted s, inverse-fit s, selected s)`` per stage count."""
    rows = []
    for s in stages:
        rho = get_tableau(s).rho
        fit = FIT_A + FIT_B * rho**FIT_C
        inv = (rho / INV_FIT_K) ** (1.0 / INV_FIT_P) - INV_FIT_S0
        rows.append((s, rho, fit, inv, select_stage_count(rho)))
    return rows


def cmd_fit_check(args, out):
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["s", "rho", "fit_s", "inverse_fit_s", "selected_s"])
    worst = 0.0
    for s, rho, fit, inv, sel in fit_rows():
        w.writerow([s, f"{rho:.8g}", f"{fit:.4f}", f"{inv:.4f}", sel])
        worst = max(worst, abs(fit - s))
    out.write(f"# max |fit_s - s| = {worst:.4f}\n")
    return EXIT_OK


def cmd_make_reference(args, out):
    for name in args.problem:
        problem = make_problem(name, reference=None)
        path, agreement = generate_reference(
            problem, tol=args.tol, directory=args.out,
            log=lambda m: print(m, file=sys.stderr))
        out.write(f"{name}: wrote {path} (rk4 agreement {agreement:.3e})\n")
    return EXIT_OK


# -- entry point ------------------------------------------------------------------

def _stage_list(text):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def build_parser():
    p = argparse.ArgumentParser(prog="monorkc", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("solve", help="run benchmark problems")
    sp.add_argument("--problem", nargs="+", required=True)
    sp.add_argument("--tol", nargs="+", type=float, required=True,
                    help="relative tolerance; also absolute unless --atol is given")
    sp.add_argument("--atol", type=float)
    rho = sp.add_mutually_exclusive_group()
    rho.add_argument("--rho-analytic", dest="rho", action="store_const", const="analytic",
                     help="require the problem's analytic spectral radius bound")
    rho.add_argument("--rho-power", dest="rho", action="store_const", const="power",
                     help="estimate the spectral radius by power iteration")
    sp.set_defaults(rho="auto")
    sp.add_argument("--seed-h", type=float, help="initial step size")
    sp.add_argument("--format", choices=("csv", "json", "table"), default="csv")
    sp.add_argument("--jobs", type=int, default=1, help="worker threads")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("table1", help="coefficient table")
    sp.add_argument("--stages", type=_stage_list, default=list(TABLE1_STAGES))
    sp.set_defaults(func=cmd_table1)

    sp = sub.add_parser("dump-polynomial", help="polynomials on [-1.05 rho_s, 0]")
    sp.add_argument("--stages", type=int, required=True)
    sp.add_argument("--points", type=int, default=201)
    sp.add_argument("--compare-rkc", action="store_true")
    sp.set_defaults(func=cmd_dump_polynomial)

    sp = sub.add_parser("dump-region", help="|R_s| on a complex grid")
    sp.add_argument("--stages", type=int, required=True)
    sp.add_argument("--re", type=_range, required=True)
    sp.add_argument("--im", type=_range, required=True)
    sp.add_argument("--nx", type=int, default=101)
    sp.add_argument("--ny", type=int, default=51)
    sp.set_defaults(func=cmd_dump_region)

    sp = sub.add_parser("fit-check", help="stage-count fit against exact selection")
    sp.set_defaults(func=cmd_fit_check)

    sp = sub.add_parser("make-reference", help="regenerate stored references")
    sp.add_argument("--problem", nargs="+", default=["burgers", "cusp", "finag", "comb"])
    sp.add_argument("--tol", type=float, default=1e-11)
    sp.add_argument("--out", help="target directory (default: data directory)")
    sp.set_defaults(func=cmd_make_reference)
    return p


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    if getattr(args, "stages", None) is not None and isinstance(args.stages, list):
        if any(s < 3 for s in args.stages):
            print("monorkc: error: stage counts must be >= 3", file=sys.stderr)
            return EXIT_USAGE
    buf = io.StringIO()
    try:
        code = args.func(args, buf)
    except UsageError as exc:
        print(f"monorkc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SolverAbort as exc:
        print(f"monorkc: solver abort: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ABORT
    out.write(buf.getvalue())
    return code


if __name__ == "__main__":
    sys.exit(main())
