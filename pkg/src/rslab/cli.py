"""Command-line front end.

Subcommands: identities, montecarlo, roundtrip (campaigns), certify and
oracle (single instances), params (parameter planner).  Flags mirror the
experiment-config fields; --config points at a JSON file whose values
override the flags.  Exit codes: 0 all checks passed, 1 a check failed,
2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction

from .certify import certification_params, certify_full_column_rank
from .gf import make_field, sample_distinct
from .harness import (
    CampaignReport,
    ConfigInvalid,
    ExperimentConfig,
    emit_report,
    run_identity_suite,
    run_monte_carlo,
    run_roundtrip,
)
from .oracle import is_avg_list_decodable
from .rscode import random_puncture
from .setsys import SetSystem


def _add_config_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="JSON file overriding the flags")
    sub.add_argument("--p", type=int, default=101)
    sub.add_argument("--m", type=int, default=1)
    sub.add_argument("--n", type=int, default=6)
    sub.add_argument("--k", type=int, default=2)
    sub.add_argument("--t", type=int, default=2)
    sub.add_argument("--list-size", type=int, default=1, dest="list_size")
    sub.add_argument("--eps", type=Fraction, default=Fraction(1, 2))
    sub.add_argument("--c", type=Fraction, default=Fraction(3))
    sub.add_argument("--delta", type=Fraction, default=Fraction(1, 2))
    sub.add_argument("--slack", type=Fraction, default=None)
    sub.add_argument("--rounds", type=int, default=None)
    sub.add_argument("--trials", type=int, default=200)
    sub.add_argument("--seed", type=int, default=20230401)
    sub.add_argument("--q-sweep", type=int, nargs="*", default=[], dest="q_sweep")
    sub.add_argument("--json-out", default=None)
    sub.add_argument("--csv-out", default=None)


def _config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    if args.config:
        with open(args.config) as fh:
            return ExperimentConfig.from_json(json.load(fh))
    return ExperimentConfig(
        p=args.p, m=args.m, n=args.n, k=args.k, t=args.t, list_size=args.list_size,
        eps=args.eps, c=args.c, delta=args.delta, slack=args.slack, rounds=args.rounds,
        trials=args.trials, seed=args.seed, q_sweep=list(args.q_sweep),
    )


def _finish(report: CampaignReport, args: argparse.Namespace) -> int:
    if args.json_out:
        emit_report(report, "json", args.json_out)
    if args.csv_out:
        emit_report(report, "csv", args.csv_out)
    for check in report.checks:
        print(f"{'PASS' if check.passed else 'FAIL'} {check.name}")
    return 0 if report.passed else 1


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="rslab")
    subs = parser.add_subparsers(dest="command", required=True)

    for name in ("identities", "montecarlo", "roundtrip"):
        _add_config_flags(subs.add_parser(name))

    cert = subs.add_parser("certify", help="certify one system at sampled points")
    cert.add_argument("--sets", required=True, help='JSON like {"n":6,"sets":[[0,1],[1,2]]}')
    cert.add_argument("--p", type=int, default=101)
    cert.add_argument("--m", type=int, default=1)
    cert.add_argument("--k", type=int, default=2)
    cert.add_argument("--rounds", type=int, default=1)
    cert.add_argument("--seed", type=int, default=0)
    cert.add_argument("--points", type=int, nargs="*", default=None,
                      help="explicit point codes instead of sampling")

    orc = subs.add_parser("oracle", help="decodability verdict for one random code")
    orc.add_argument("--p", type=int, default=7)
    orc.add_argument("--m", type=int, default=1)
    orc.add_argument("--n", type=int, default=5)
    orc.add_argument("--k", type=int, default=2)
    orc.add_argument("--list-size", type=int, default=1, dest="list_size")
    orc.add_argument("--radius", type=Fraction, required=True)
    orc.add_argument("--seed", type=int, default=0)

    par = subs.add_parser("params", help="parameter planner")
    par.add_argument("--mode", choices=("main", "capacity"), default="main")
    par.add_argument("--eps", type=Fraction, required=True)
    par.add_argument("--c", type=Fraction, default=Fraction(3))
    par.add_argument("--delta", type=Fraction, default=Fraction(1, 2))
    par.add_argument("--n", type=int, required=True)
    par.add_argument("--k", type=int, required=True)
    par.add_argument("--list-size", type=int, default=None, dest="list_size")

    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0

    try:
        if args.command == "identities":
            return _finish(run_identity_suite(_config_from_args(args)), args)
        if args.command == "montecarlo":
            return _finish(run_monte_carlo(_config_from_args(args)), args)
        if args.command == "roundtrip":
            return _finish(run_roundtrip(_config_from_args(args)), args)
        if args.command == "certify":
            ctx = make_field(args.p, args.m)
            system = SetSystem.from_json(args.sets)
            if args.points is not None:
                pts = tuple(ctx.element_by_code(c) for c in args.points)
            else:
                pts = sample_distinct(ctx, system.n, random.Random(args.seed))
            outcome = certify_full_column_rank(system, args.k, pts, args.rounds)
            print(json.dumps(outcome.to_json(), indent=2))
            return 0 if outcome.is_success else 1
        if args.command == "oracle":
            ctx = make_field(args.p, args.m)
            code = random_puncture(ctx, args.n, args.k, random.Random(args.seed))
            verdict = is_avg_list_decodable(code, args.radius, args.list_size)
            print(json.dumps({"code": code.to_json(), **verdict.to_json()}, indent=2))
            return 0 if verdict.decodable else 1
        if args.command == "params":
            plan = certification_params(
                args.mode, eps=args.eps, c=args.c, n=args.n, k=args.k,
                list_size=args.list_size, delta=args.delta,
            )
            print(json.dumps(plan.to_json(), indent=2))
            return 0
    except (ConfigInvalid, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 2


if __name__ == "__main__":
    sys.exit(main())
