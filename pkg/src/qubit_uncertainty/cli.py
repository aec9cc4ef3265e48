"""
Command-line interface.

    qubit-uncertainty verify   --trials 100000 --seed 42
    qubit-uncertainty sweep    fig1 --gamma 0.894427 --steps 64 --out fig1.csv
    qubit-uncertainty compare  --obs sx sy sz --state 0,0,0.5
    qubit-uncertainty estimate --obs sx sy --state 0.6,0,0 --shots 1000000

Exit codes: 0 success, 1 property or validation failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import io
import json
import logging
import math
import sys
from typing import List, Optional

from . import bounds, estimator, sweeps, verify
from .moments import mixedness
from .output import atomic_write, render_sweep, render_table
from .pauli import PauliObservable, parse_observable, parse_state

log = logging.getLogger("qubit_uncertainty")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {value}")
    return value


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def parse_observables(tokens: List[str]) -> List[PauliObservable]:
    out = []
    for pos, tok in enumerate(tokens, start=1):
        try:
            out.append(parse_observable(tok))
        except ValueError as exc:
            raise UsageError(f"cannot parse observable token {pos} ({tok!r}): {exc}") from None
    return out


def _state(text: str):
    try:
        return parse_state(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        atomic_write(out, text)
    else:
        sys.stdout.write(text)


# -- verify -----------------------------------------------------------------

def cmd_verify(args) -> int:
    if args.replay:
        with open(args.replay) as fh:
            witness = json.load(fh)
        value = verify.replay(witness)
        print(f"{witness['property']}: replayed violation {value:.17g} "
              f"(recorded {witness['violation']:.17g})")
        return EXIT_OK

    results = verify.run_suite(args.trials, args.seed)
    width = max(len(r.name) for r in results)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{r.name:<{width}}  max violation {r.worst: .3e}  tol {r.tolerance:.0e}  {status}")
    failed = [r for r in results if not r.passed]
    if args.out:
        doc = {
            "trials": args.trials,
            "seed": args.seed,
            "properties": [
                {"name": r.name, "worst": r.worst, "tolerance": r.tolerance,
                 "passed": r.passed, "description": r.description, "witness": r.witness}
                for r in results
            ],
        }
        atomic_write(args.out, json.dumps(doc, indent=1) + "\n")
    for r in failed:
        path = f"failing-{r.name}.json"
        atomic_write(path, json.dumps(r.witness, indent=1) + "\n")
        print(f"{r.name}: offending configuration written to {path} (replay with --replay)",
              file=sys.stderr)
    return EXIT_FAIL if failed else EXIT_OK


# -- sweep ------------------------------------------------------------------

def cmd_sweep(args) -> int:
    steps = args.steps
    if steps < 2:
        raise UsageError("--steps must be at least 2")
    if args.figure == "fig1":
        gamma = math.sqrt(0.8) if args.gamma is None else args.gamma
        if not 0.0 <= gamma <= 1.0:
            raise UsageError(f"--gamma must lie in [0, 1], got {gamma}")
        grid = sweeps.sweep_fig1(gamma, steps, steps)
    elif args.figure == "fig2":
        theta = 3 * math.pi / 4 if args.theta is None else args.theta
        phi = math.pi / 4 if args.phi is None else args.phi
        grid = sweeps.sweep_fig2(theta, phi, steps)
    else:
        grid = sweeps.sweep_fig3(steps)
    _emit(render_sweep(grid, args.format), args.out)
    return EXIT_OK


# -- compare ----------------------------------------------------------------

COMPARE_COLUMNS = ["N", "lhs_sum_std", "lhs_sum_var", "rhs_eq6", "rhs_eq14", "sur", "lhs_var_product",
                   "mp", "rhs_eq3", "rhs_eq4", "rhs_eq5", "t1", "t2", "t3", "t4"]


def _compare_row(cmp: bounds.BoundComparison, ratios: sweeps.TightnessRatios) -> dict:
    return {
        "N": cmp.observable_count,
        "lhs_sum_std": cmp.lhs_sum_stddev,
        "lhs_sum_var": cmp.lhs_sum_variance,
        "rhs_eq6": cmp.equality_rhs,
        "rhs_eq14": cmp.inequality_rhs,
        "sur": cmp.sur_bound,
        "lhs_var_product": cmp.lhs_variance_product,
        "mp": cmp.mp_bound,
        "rhs_eq3": cmp.eq3_bound,
        "rhs_eq4": cmp.eq4_bound,
        "rhs_eq5": cmp.eq5_bound,
        "t1": ratios.t1, "t2": ratios.t2, "t3": ratios.t3, "t4": ratios.t4,
    }


def cmd_compare(args) -> int:
    obs = parse_observables(args.obs or [])
    if len(obs) < 2:
        raise UsageError("compare needs at least two observables (--obs)")
    state = _state(args.state)
    cmp = bounds.compare(obs, state)
    row = _compare_row(cmp, sweeps.tightness(obs, state))
    width = max(len(c) for c in COMPARE_COLUMNS)
    for col in COMPARE_COLUMNS:
        value = row[col]
        text = "n/a" if value is None else (str(value) if isinstance(value, int) else f"{value:.12g}")
        print(f"{col:<{width}}  {text}")
    if args.out:
        atomic_write(args.out, render_table(COMPARE_COLUMNS, [row], args.format,
                                            {"observables": [list(o.coefficients) for o in obs],
                                             "state": [state.p1, state.p2, state.p3]}))
    return EXIT_OK


# -- estimate ---------------------------------------------------------------

REPORT_COLUMNS = ["m_hat", "lo", "hi", "clamped", "shots_per_setting", "true_m", "abs_error"]


def cmd_estimate(args) -> int:
    if args.counts_file:
        with open(args.counts_file) as fh:
            try:
                records = estimator.read_records(fh)
            except ValueError as exc:
                raise UsageError(str(exc)) from None
        try:
            report = estimator.estimate_from_records(
                records, estimator.bootstrap_stream(args.seed), args.resamples)
        except estimator.CommutingPairError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_FAIL
    else:
        obs = parse_observables(args.obs or [])
        if len(obs) != 2:
            raise UsageError("estimate needs exactly two observables (--obs A B)")
        if args.state is None:
            raise UsageError("estimate needs --state (or --counts-file)")
        if args.shots < estimator.MIN_RECOMMENDED_SHOTS:
            raise UsageError(f"--shots must be at least {estimator.MIN_RECOMMENDED_SHOTS}")
        state = _state(args.state)
        try:
            estimator.check_pair(obs[0], obs[1])
        except estimator.CommutingPairError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_FAIL
        # same stream split as estimator.estimate_mixedness(..., seed)
        records = estimator.simulate_records(obs[0], obs[1], state, args.shots,
                                             estimator.sampling_stream(args.seed))
        report = estimator.estimate_from_records(records, estimator.bootstrap_stream(args.seed),
                                                 args.resamples, true_m=mixedness(state))
        if args.export_counts:
            buf = io.StringIO()
            estimator.write_records(records, buf)
            atomic_write(args.export_counts, buf.getvalue())

    row = {
        "m_hat": report.m_hat, "lo": report.interval[0], "hi": report.interval[1],
        "clamped": report.clamped, "shots_per_setting": report.shots_per_setting,
        "true_m": report.true_m, "abs_error": report.abs_error,
    }
    print(f"m_hat     {report.m_hat:.6f}")
    print(f"95% CI    [{report.interval[0]:.6f}, {report.interval[1]:.6f}]")
    print(f"clamped   {'yes' if report.clamped else 'no'}")
    print(f"shots     {report.shots_per_setting} per setting")
    if report.true_m is not None:
        print(f"true M    {report.true_m:.6f}")
        print(f"abs error {report.abs_error:.2e}")
    if args.out:
        atomic_write(args.out, render_table(REPORT_COLUMNS, [row], args.format))
    return EXIT_OK


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qubit-uncertainty",
        description="Sum-of-standard-deviations uncertainty relations for a qubit.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_seed, default=0)
    common.add_argument("--out", help="output file (written atomically)")
    common.add_argument("--format", choices=["csv", "json"], default="csv")

    p = sub.add_parser("verify", parents=[common], help="randomized property suite")
    p.add_argument("--trials", type=_positive_int, default=10000)
    p.add_argument("--replay", help="JSON file with a serialized failing configuration")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", parents=[common], help="figure data sweeps")
    p.add_argument("figure", choices=["fig1", "fig2", "fig3"])
    p.add_argument("--steps", type=_positive_int, default=64, help="grid points per axis")
    p.add_argument("--gamma", type=float, help="Bloch radius for fig1 (default sqrt(0.8))")
    p.add_argument("--theta", type=float, help="polar angle for fig2 (default 3pi/4)")
    p.add_argument("--phi", type=float, help="azimuth for fig2 (default pi/4)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("compare", parents=[common], help="bounds and tightness for one configuration")
    p.add_argument("--obs", nargs="+", action="extend", metavar="OBS",
                   help="observables: sx, sy, sz, id or a1,a2,a3,a4 (repeatable)")
    p.add_argument("--state", required=True, help="Bloch vector p1,p2,p3")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("estimate", parents=[common], help="mixedness from finite-shot statistics")
    p.add_argument("--obs", nargs="+", action="extend", metavar="OBS")
    p.add_argument("--state", help="Bloch vector p1,p2,p3 (simulation mode)")
    p.add_argument("--shots", type=_positive_int, default=100000, help="shots per setting")
    p.add_argument("--resamples", type=_positive_int, default=1000)
    p.add_argument("--counts-file", help="CSV of measured counts; skips simulation")
    p.add_argument("--export-counts", help="write the simulated counts to this CSV")
    p.set_defaults(func=cmd_estimate)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"{parser.prog}: I/O error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
