"""Command line: run scenarios, list the corpus, evaluate radial spectral quantities.

Exit codes: 0 all checks pass, 1 a check failed, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from . import checks as ck
from . import constructions as cons
from . import scenario as sc
from . import spectral as spc
from .report import dumps

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _csv(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def _load(target: str) -> sc.Scenario:
    if sc.is_corpus_name(target):
        return sc.from_corpus(target)
    try:
        return sc.load(target)
    except FileNotFoundError:
        raise InputError(f"{target}: neither a readable file nor a corpus name (see `list`)") from None
    except sc.ScenarioError as err:
        raise InputError(f"{target}: {err}") from None


def cmd_run(args) -> int:
    scen = _load(args.target)
    names = scen.checks
    if args.checks:
        names = _csv(args.checks)
        bad = [n for n in names if n not in ck.REGISTRY]
        if bad:
            raise InputError(f"unknown checks: {', '.join(bad)}")
    if args.points is not None and args.points <= 0:
        raise InputError("--points must be positive")
    if args.tol_scale <= 0:
        raise InputError("--tol-scale must be positive")
    report = ck.run_checks(scen.chart, scen.structure, names,
                           n_points=args.points or scen.count,
                           seed=scen.seed if args.seed is None else args.seed,
                           margin=scen.margin, tolerances=scen.tolerances,
                           tol_scale=args.tol_scale, scenario=scen.name)
    if not args.quiet:
        print("\n".join(report.summary_lines()))
    if args.json:
        text = report.to_json(timing=not args.no_timing)
        if args.json == "-":
            sys.stdout.write(text)
        else:
            with open(args.json, "w", encoding="utf-8") as fh:
                fh.write(text)
    return report.exit_code


def cmd_list(args) -> int:
    if args.checks:
        for name in ck.check_names():
            c = ck.REGISTRY[name]
            print(f"{name:<36}{c.scope:<10}{c.tolerance:<8.0e}{c.anchor}")
        return EXIT_OK
    for name in cons.corpus_names():
        print(f"{name:<26}{cons.CORPUS[name].case}")
    return EXIT_OK


def _out(d: dict) -> int:
    sys.stdout.write(dumps(d))
    return EXIT_OK


def cmd_spectral(args) -> int:
    try:
        if args.sub == "critical-curve":
            vals = [spc.critical_curve(args.v, r) for r in args.r]
            return _out({"v": args.v, "r": args.r, "chi": vals})
        if args.sub == "condition":
            rep = spc.divergence_condition_report(args.qbar, args.v, args.R, args.r_max, n=args.n)
            return _out(rep.as_dict())
        if args.sub == "lambda1":
            model = (spc.RadialModel.flat(args.m, args.qbar) if args.warp is None
                     else spc.RadialModel.warped(args.m, args.warp, args.qbar))
            lam = spc.lambda1_radial(model, args.R, args.n)
            return _out({"m": args.m, "R": args.R, "n_grid": args.n, "warp": args.warp,
                         "qbar": args.qbar, "lambda1": lam})
    except (spc.NotIntegrable, spc.SignViolation, spc.NonSPD) as err:
        raise InputError(f"{type(err).__name__}: {err}") from None
    raise InputError(f"unknown spectral subcommand {args.sub!r}")


def _number_or_expr(text: str):
    try:
        return float(text)
    except ValueError:
        return text


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="einstype", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"einstype {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run checks on a scenario file or a corpus name")
    r.add_argument("target")
    r.add_argument("--json", metavar="OUT", help="write the JSON report ('-' for stdout)")
    r.add_argument("--points", type=int, help="sample points per check")
    r.add_argument("--seed", type=int)
    r.add_argument("--tol-scale", type=float, default=1.0, help="multiply every tolerance")
    r.add_argument("--checks", help="comma-separated subset of checks")
    r.add_argument("--no-timing", action="store_true", help="omit wall times from the JSON report")
    r.add_argument("--quiet", action="store_true", help="no summary table")
    r.set_defaults(fn=cmd_run)

    li = sub.add_parser("list", help="list corpus examples (or checks with --checks)")
    li.add_argument("--checks", action="store_true")
    li.set_defaults(fn=cmd_list)

    s = sub.add_parser("spectral", help="radial spectral surrogates")
    ssub = s.add_subparsers(dest="sub", required=True)
    c = ssub.add_parser("critical-curve", help="chi(r) for a boundary-area majorant v(r)")
    c.add_argument("--v", required=True, help="expression in r")
    c.add_argument("--r", type=float, nargs="+", required=True)
    c = ssub.add_parser("condition", help="trajectory of the divergence condition on [R, r_max]")
    c.add_argument("--qbar", required=True, type=_number_or_expr)
    c.add_argument("--v", required=True)
    c.add_argument("--R", type=float, default=1.0)
    c.add_argument("--r-max", type=float, default=1e4)
    c.add_argument("--n", type=int, default=400)
    c = ssub.add_parser("lambda1", help="first Dirichlet eigenvalue of a radial model on a ball")
    c.add_argument("--m", type=int, required=True)
    c.add_argument("--R", type=float, default=1.0)
    c.add_argument("--n", type=int, default=2000)
    c.add_argument("--warp", help="warping function w(r); flat when omitted")
    c.add_argument("--qbar", type=_number_or_expr, default=0.0)
    s.set_defaults(fn=cmd_spectral)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:      # argparse exits 2 on usage errors already
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except InputError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT
    except (ValueError, KeyError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
