"""Command line front door: ``gti <command> [options]``.

Exit codes: 0 success or pass, 1 a checked bound failed, 2 usage error.
Item indices on the command line and in files are one-based.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

from . import io as gio
from .bounds import fano_lb_dcp, fano_lb_scp, fano_lb_ub_scenario
from .complexity import beta_dcp, beta_dcp_ub, beta_exact, beta_exact_asymptotic, beta_ub
from .decode import decode_exact, decode_ub
from .design import exact_params, iid_design, substream, ub_params
from .harness import SweepSpec, TrialConfig, report_render, rows_to_csv, rows_to_json, run_trials, sweep
from .model import simulate_outcomes
from .oracle import ResourceLimitError, consistent_assignments, empirical_p_y

GLOBAL_DEFAULTS = {"seed": 0, "json": False, "out": None, "workers": 1}


def _global_flags() -> argparse.ArgumentParser:
    # SUPPRESS lets the flags appear before or after the subcommand
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="master RNG seed")
    p.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="JSON output")
    p.add_argument("--out", default=argparse.SUPPRESS, help="output path")
    p.add_argument("--workers", type=int, default=argparse.SUPPRESS, help="worker processes")
    return p


def _int_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _grid(text: str) -> tuple[tuple[int, int], ...]:
    cells = []
    for tok in text.split(","):
        try:
            r, d = tok.split(":")
            cells.append((int(r), int(d)))
        except ValueError:
            raise argparse.ArgumentTypeError(f"grid cells look like r:d, got {tok!r}") from None
    return tuple(cells)


def _population_flags(p: argparse.ArgumentParser, lists: bool = False) -> None:
    kind = _int_list if lists else int
    p.add_argument("--d", type=kind, help="number of defectives (exact mode)")
    p.add_argument("--r", type=kind, help="number of inhibitors (exact mode)")
    p.add_argument("--R", type=kind, help="upper bound on inhibitors")
    p.add_argument("--D", type=kind, help="upper bound on defectives")


def build_parser() -> argparse.ArgumentParser:
    common = _global_flags()
    parser = argparse.ArgumentParser(prog="gti", parents=[common],
                                     description="Group testing with inhibitors: designs, decoders, bounds, trials.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("design", parents=[common], help="draw an i.i.d. pooling design")
    p.add_argument("--n", type=int, required=True)
    _population_flags(p)
    p.add_argument("--p", type=float, help="override the participation probability")
    p.add_argument("--tests", type=int, help="number of tests (T, or T1 in ub mode)")
    p.add_argument("--tests2", type=int, help="number of tests of the second matrix (ub mode)")
    p.add_argument("--delta", type=float, default=1.0, help="error exponent used when T is not given")
    p.add_argument("--out2", help="matrix file for the second matrix (ub mode)")

    p = sub.add_parser("simulate", parents=[common], help="outcomes of a design on a population")
    p.add_argument("--matrix", required=True)
    p.add_argument("--population", required=True)

    p = sub.add_parser("decode", parents=[common], help="classify items from outcomes")
    p.add_argument("--matrix", required=True)
    p.add_argument("--outcomes", required=True)
    p.add_argument("--mode", choices=("exact", "ub"), default="exact")
    p.add_argument("--matrix2")
    p.add_argument("--outcomes2")
    _population_flags(p)
    p.add_argument("--p", type=float, help="participation probability the design was drawn with")
    p.add_argument("--threshold", type=float, help="override the defective threshold fraction")

    p = sub.add_parser("tests", parents=[common], help="closed-form number of tests")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--delta", type=float, default=1.0)
    _population_flags(p)
    p.add_argument("--p", type=float)
    p.add_argument("--dcp", action="store_true", help="defectives only")
    p.add_argument("--asymptotic", action="store_true", help="large r+d approximation (exact mode)")

    p = sub.add_parser("bound", parents=[common], help="information-theoretic lower bound")
    p.add_argument("--n", type=int, required=True)
    _population_flags(p)
    p.add_argument("--pe", type=float, default=0.0)
    p.add_argument("--problem", choices=("scp", "dcp"), default="scp")

    p = sub.add_parser("sweep", parents=[common], help="designed T and bounds over a grid")
    p.add_argument("--mode", choices=("exact", "ub"), default="exact")
    p.add_argument("--n", type=_int_list, required=True)
    _population_flags(p, lists=True)
    p.add_argument("--pair", action="store_true", help="zip the d/r (or R/D) lists instead of crossing them")
    p.add_argument("--delta", type=float, default=1.0)
    p.add_argument("--pe", type=float, default=0.0)
    p.add_argument("--problem", choices=("scp", "dcp"), default="scp")
    p.add_argument("--trials", type=int, default=0, help="Monte Carlo trials per point (0: closed form only)")

    p = sub.add_parser("oracle", parents=[common], help="brute-force references")
    p.add_argument("what", nargs="?", choices=("consistency", "py"), default="consistency")
    p.add_argument("--matrix")
    p.add_argument("--outcomes")
    p.add_argument("--n", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--g", type=int)
    p.add_argument("--method", choices=("count", "enumerate", "sample"), default="count")
    p.add_argument("--samples", type=int, default=100_000)

    p = sub.add_parser("trial", parents=[common], help="Monte Carlo error estimation")
    p.add_argument("--n", type=int, required=True)
    _population_flags(p)
    p.add_argument("--grid", type=_grid, help="ub-mode cells as r:d,r:d,...")
    p.add_argument("--delta", type=float, default=1.0)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--problem", choices=("scp", "dcp"), default="scp")
    p.add_argument("--p", type=float)
    p.add_argument("--T", type=int, help="override T (T1 in ub mode)")
    p.add_argument("--T2", type=int, help="override T2 (ub mode)")
    return parser


class UsageError(ValueError):
    pass


def _mode(args) -> str:
    exact = args.d is not None or args.r is not None
    ub = args.R is not None or args.D is not None
    if exact == ub:
        raise UsageError("give either --d and --r, or --R and --D")
    if exact and (args.d is None or args.r is None):
        raise UsageError("exact mode needs both --d and --r")
    if ub and (args.R is None or args.D is None):
        raise UsageError("upper-bound mode needs both --R and --D")
    return "exact" if exact else "ub"


def _emit(text: str, args) -> None:
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def cmd_design(args) -> int:
    if _mode(args) == "exact":
        par = exact_params(args.n, args.d, args.r, args.p)
        T = args.tests or beta_exact(args.n, args.d, args.r, args.delta, args.p).tests
        design = iid_design(T, args.n, par.p, args.seed)
        info = {"mode": "exact", "p": par.p, "tau": par.tau, "q": par.q, "a": par.a, "b": par.b,
                "threshold_fraction": par.threshold_fraction, "T": T, "seed": args.seed}
        if args.out:
            gio.write_matrix(design, args.out)
    else:
        par = ub_params(args.R, args.D)
        b1, b2 = beta_ub(args.n, args.R, args.D, args.delta)
        T1, T2 = args.tests or b1.tests, args.tests2 or b2.tests
        # same role keys as the trial harness: 1 for the first matrix, 2 for the second
        m1 = iid_design(T1, args.n, par.p1, substream(args.seed, 1))
        m2 = iid_design(T2, args.n, par.p2, substream(args.seed, 2))
        info = {"mode": "ub", "p1": par.p1, "p2": par.p2, "qR": par.qR, "tau": par.tau,
                "stage1_threshold_fraction": par.stage1_threshold_fraction,
                "T1": T1, "T2": T2, "seed": args.seed}
        if args.out:
            gio.write_matrix(m1, args.out)
        if args.out2:
            gio.write_matrix(m2, args.out2)
    sys.stdout.write(_dump(info))
    return 0


def cmd_simulate(args) -> int:
    design = gio.read_matrix(args.matrix)
    pop = gio.read_population(args.population)
    y = simulate_outcomes(design, pop)
    if args.out:
        gio.write_outcomes(y, args.out)
    else:
        gio.write_outcomes(y, sys.stdout)
    return 0


def cmd_decode(args) -> int:
    design = gio.read_matrix(args.matrix)
    y = gio.read_outcomes(args.outcomes)
    if args.mode == "exact":
        if args.d is None or args.r is None:
            raise UsageError("exact decoding needs --d and --r")
        par = exact_params(design.n, args.d, args.r, args.p)
        if args.threshold is not None:
            par = replace(par, threshold_fraction=args.threshold)
        c = decode_exact(design, y, par)
    else:
        if not (args.matrix2 and args.outcomes2):
            raise UsageError("ub decoding needs --matrix2 and --outcomes2")
        if args.R is None or args.D is None:
            raise UsageError("ub decoding needs --R and --D")
        d2 = gio.read_matrix(args.matrix2)
        y2 = gio.read_outcomes(args.outcomes2)
        c = decode_ub(design, y, d2, y2, ub_params(args.R, args.D))
    _emit(_dump(c.to_dict(one_based=True)), args)
    return 0


def cmd_tests(args) -> int:
    if _mode(args) == "exact":
        if args.dcp:
            b = beta_dcp(args.n, args.d, args.r, args.delta, args.p)
        elif args.asymptotic:
            b = beta_exact_asymptotic(args.n, args.d, args.r, args.delta)
        else:
            b = beta_exact(args.n, args.d, args.r, args.delta, args.p)
        out = b.to_dict()
    elif args.dcp:
        out = beta_dcp_ub(args.n, args.R, args.D, args.delta).to_dict()
    else:
        b1, b2 = beta_ub(args.n, args.R, args.D, args.delta)
        out = {"beta1": b1.to_dict(), "beta2": b2.to_dict(), "T1": b1.tests, "T2": b2.tests,
               "T": b1.tests + b2.tests}
    _emit(_dump(out), args)
    return 0


def cmd_bound(args) -> int:
    if _mode(args) == "exact":
        fn = fano_lb_scp if args.problem == "scp" else fano_lb_dcp
        rep = fn(args.n, args.d, args.r, args.pe)
    else:
        rep = fano_lb_ub_scenario(args.n, args.R, args.D, args.pe, args.problem)
    _emit(_dump(rep.to_dict()), args)
    return 0


def _sweep_points(args) -> tuple[tuple[int, int, int], ...]:
    a, b = (args.d, args.r) if args.mode == "exact" else (args.R, args.D)
    if not a or not b:
        raise UsageError("sweep needs --d and --r lists (exact) or --R and --D lists (ub)")
    if args.pair:
        if len(a) != len(b):
            raise UsageError("--pair needs lists of equal length")
        pairs = list(zip(a, b))
    else:
        pairs = [(x, y) for x in a for y in b]
    return tuple((n, x, y) for n in args.n for x, y in pairs)


def cmd_sweep(args) -> int:
    spec = SweepSpec(points=_sweep_points(args), mode=args.mode, delta=args.delta, pe=args.pe,
                     problem=args.problem, trials=args.trials, seed=args.seed)
    rows = sweep(spec, workers=args.workers)
    _emit(rows_to_json(rows) if args.json else rows_to_csv(rows), args)
    return 0


def cmd_oracle(args) -> int:
    if args.what == "py":
        if None in (args.n, args.d, args.r, args.g):
            raise UsageError("oracle py needs --n --d --r --g")
        est = empirical_p_y(args.n, args.d, args.r, args.g, method=args.method,
                            samples=args.samples, seed=args.seed)
        _emit(_dump({"p_y": est.value, "half_width": est.half_width, "method": args.method}), args)
        return 0
    if None in (args.matrix, args.outcomes, args.d, args.r):
        raise UsageError("oracle needs --matrix --outcomes --d --r")
    cs = consistent_assignments(gio.read_matrix(args.matrix), gio.read_outcomes(args.outcomes), args.d, args.r)
    _emit(_dump(cs.to_dict(one_based=True)), args)
    return 0


def cmd_trial(args) -> int:
    if _mode(args) == "exact":
        cfg = TrialConfig(n=args.n, mode="exact", d=args.d, r=args.r, delta=args.delta,
                          trials=args.trials, seed=args.seed, problem=args.problem,
                          p=args.p, T=args.T)
    else:
        cfg = TrialConfig(n=args.n, mode="ub", R=args.R, D=args.D, grid=args.grid,
                          delta=args.delta, trials=args.trials, seed=args.seed,
                          problem=args.problem, T=args.T, T2=args.T2)
    report = run_trials(cfg, workers=args.workers)
    text, code = report_render(report)
    _emit(report.to_json() if args.json else text, args)
    return code


COMMANDS = {
    "design": cmd_design, "simulate": cmd_simulate, "decode": cmd_decode, "tests": cmd_tests,
    "bound": cmd_bound, "sweep": cmd_sweep, "oracle": cmd_oracle, "trial": cmd_trial,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for key, value in GLOBAL_DEFAULTS.items():
        if not hasattr(args, key):
            setattr(args, key, value)
    try:
        return COMMANDS[args.command](args)
    except (ValueError, IndexError, ResourceLimitError, OSError) as exc:
        print(f"gti {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
