"""Command-line entry point.

Exit codes: 0 success, 2 configuration or validation error, 3 infeasible
problem (no nonempty subset fits the budget), 4 size limit exceeded.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .cdf import parse_cdf
from .errors import InvalidInputError, MajvoteError
from .experiments import ensemble_vote_simulate, parse_stop, run_experiment
from .knapsack import DEFAULT_WEIGHT_EXPONENT, SolveRequest, evaluate_subset, solve, total_time
from .pnk import GenerativeModel, pnk_closed_form, pnk_monte_carlo
from .reporting import Record, emit_report, load_experiment_spec, parse_pool
from .schemes import parse_scheme
from .theory import asymptotic_accuracy, expected_accuracy, variance_bound

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_SIZE = 4


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InvalidInputError(f"cannot read {path}: {exc.strerror}") from None


def _need_seed(args, parser):
    if args.seed is None:
        parser.error(f"--seed is required for {args.command}")


def cmd_evaluate(args, parser) -> int:
    pool = parse_pool(_read(args.pool))
    subset = [s for s in args.subset.split(",") if s]
    scheme = parse_scheme(args.scheme)
    acc = evaluate_subset(pool, subset, scheme)
    record = Record("evaluation", {
        "subset": subset,
        "scheme": scheme.label,
        "accuracy": acc,
        "total_time": total_time(pool, subset),
    })
    emit_report(record, args.format, args.out)
    return EXIT_OK


def cmd_solve(args, parser) -> int:
    if args.method == "stochastic":
        _need_seed(args, parser)
    pool = parse_pool(_read(args.pool))
    req = SolveRequest(
        pool,
        args.budget,
        parse_scheme(args.scheme),
        restarts=args.restarts,
        seed=args.seed or 0,
        weight_exponent=args.weight_exponent,
        stop_rule=parse_stop(args.stop),
    )
    report = solve(req, args.method)
    emit_report(report, args.format, args.out)
    if report.infeasible:
        print("no nonempty subset fits the budget", file=sys.stderr)
        return EXIT_INFEASIBLE
    return EXIT_OK


def cmd_pnk(args, parser) -> int:
    ks = [args.k] if args.k is not None else list(range(args.n + 1))
    rows = []
    if args.method == "formula":
        for k in ks:
            v = pnk_closed_form(args.n, k, args.d)
            rows.append({"k": k, "exact": f"{v.exact.numerator}/{v.exact.denominator}", "value": v.value})
        fields = {"n": args.n, "d": args.d, "method": "formula"}
    else:
        _need_seed(args, parser)
        model = GenerativeModel.parse(args.model)
        for k in ks:
            est = pnk_monte_carlo(args.n, k, args.d, model, args.trials, (args.seed + k) % 2**64, args.workers)
            rows.append({"k": k, "value": est.mean, "stderr": est.stderr, "trials": est.trials})
        fields = {"n": args.n, "d": args.d, "method": "mc", "model": model.value,
                  "seed": args.seed, "workers": args.workers}
    emit_report(Record("pnk_table", fields, rows), args.format, args.out)
    return EXIT_OK


def cmd_theory(args, parser) -> int:
    cdf = parse_cdf(args.cdf)
    record = Record("theory", {
        "cdf": cdf.label,
        "mu": args.mu,
        "n": args.n,
        "expected_accuracy": expected_accuracy(cdf, args.mu, args.n),
        "asymptotic_accuracy": asymptotic_accuracy(cdf, args.mu),
        "variance_bound": variance_bound(cdf, args.mu),
    })
    emit_report(record, args.format, args.out)
    return EXIT_OK


def cmd_simulate(args, parser) -> int:
    _need_seed(args, parser)
    pool = parse_pool(_read(args.pool))
    est = ensemble_vote_simulate(pool, args.d, args.model, args.trials, args.seed, args.workers)
    record = Record("simulation", {
        "d": args.d,
        "model": GenerativeModel.parse(args.model).value,
        "trials": est.trials,
        "seed": args.seed,
        "workers": args.workers,
        "accuracy": est.mean,
        "stderr": est.stderr,
    })
    emit_report(record, args.format, args.out)
    return EXIT_OK


def cmd_experiment(args, parser) -> int:
    spec = load_experiment_spec(_read(args.spec))
    if args.workers != 1:
        spec.workers = args.workers
    emit_report(run_experiment(spec), args.format, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="majvote", description=__doc__.splitlines()[0])
    parser.add_argument("--workers", type=int, default=1, help="worker count for Monte-Carlo runs (default 1)")
    sub = parser.add_subparsers(dest="command", required=True)

    def output(p):
        p.add_argument("--out", default="-", help="output path, '-' for stdout")
        p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("evaluate", help="accuracy of a fixed subset")
    p.add_argument("--pool", required=True)
    p.add_argument("--subset", required=True, help="comma-separated ids")
    p.add_argument("--scheme", default="classical")
    output(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("solve", help="best subset under a time budget")
    p.add_argument("--pool", required=True)
    p.add_argument("--budget", type=float, required=True)
    p.add_argument("--scheme", default="classical")
    p.add_argument("--method", choices=("exhaustive", "stochastic"), default="exhaustive")
    p.add_argument("--restarts", type=int, default=500)
    p.add_argument("--seed", type=int)
    p.add_argument("--stop", default="fixed", help="fixed | improve:<eps>")
    p.add_argument("--weight-exponent", type=float, default=DEFAULT_WEIGHT_EXPONENT)
    output(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("pnk", help="tie-break coefficients p_{n,k}(d)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--method", choices=("formula", "mc"), default="formula")
    p.add_argument("--model", choices=("wrong", "all"), default="wrong")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int)
    output(p)
    p.set_defaults(func=cmd_pnk)

    p = sub.add_parser("theory", help="expected accuracy, limit and variance bound")
    p.add_argument("--cdf", required=True, help="step | arcsine | beta:<a>:<b> | point:<mu> | ...")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    output(p)
    p.set_defaults(func=cmd_theory)

    p = sub.add_parser("simulate", help="plurality-vote accuracy of a pool by simulation")
    p.add_argument("--pool", required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--model", choices=("wrong", "all"), default="wrong")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int)
    output(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("experiment", help="run an experiment spec file")
    p.add_argument("--spec", required=True)
    output(p)
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except MajvoteError as exc:
        print(f"majvote: error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
