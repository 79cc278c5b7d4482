"""``anfbench`` command-line entry point.

Exit codes: 0 expectation met, 1 counterexample (or negative verdict),
2 usage or parse error, 3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import harness
from .anf import anf_exp
from .anf_spec import Accepted, JudgmentQuery, check_judgment
from .cps import cps_program_output
from .eval_anf import eval_anf
from .eval_src import OOT, eval_src
from .logrel import AnfConfig, LogRelConfig, exp_rel_bounded
from .surface import ParseError, parse, parse_ctor_table, parse_many, render
from .syntax import (
    DEFAULT_CTORS,
    AnfBenchError,
    Halt,
    IllFormedError,
    NameSupply,
    StuckError,
    check_src,
    plug,
)

EXIT_OK, EXIT_COUNTEREXAMPLE, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _text(arg: str) -> str:
    """A literal s-expression, ``-`` for stdin, or a path to read."""
    if arg == "-":
        return sys.stdin.read()
    if arg.lstrip().startswith("("):
        return arg
    p = Path(arg)
    if not p.is_file():
        raise UsageError(f"no such file: {arg}")
    return p.read_text(encoding="utf-8")


def _ctors(args):
    if getattr(args, "ctors_inline", None):
        return parse_ctor_table(args.ctors_inline.replace(";", "\n"))
    if getattr(args, "ctors", None):
        p = Path(args.ctors)
        if not p.is_file():
            raise UsageError(f"no such constructor table: {args.ctors}")
        return parse_ctor_table(p.read_text(encoding="utf-8"))
    return DEFAULT_CTORS


def _emit(args, pairs: dict):
    if getattr(args, "json", False):
        print(json.dumps(pairs, sort_keys=False))
    else:
        for k, v in pairs.items():
            print(f"{k}\t{v}")


# --------------------------------------------------------------------------
# subcommands


def cmd_parse(args) -> int:
    obj = parse(_text(args.input), args.kind, _ctors(args))
    _emit(args, {"kind": args.kind, "term": render(obj)})
    return EXIT_OK


def cmd_eval_src(args) -> int:
    ctors = _ctors(args)
    e = parse(_text(args.input), "source", ctors)
    env = parse(_text(args.env), "src-env", ctors) if args.env else ()
    check_src(e, len(env), ctors)
    try:
        r, used = eval_src(env, e, args.budget, ctors)
    except StuckError as exc:
        _emit(args, {"result": "stuck", "reason": str(exc)})
        return EXIT_COUNTEREXAMPLE
    _emit(args, {"result": "OOT" if r is OOT else render(r.value), "consumed": used})
    return EXIT_OK


def cmd_eval_anf(args) -> int:
    ctors = _ctors(args)
    e = parse(_text(args.input), "anf", ctors)
    env = parse(_text(args.env), "anf-env", ctors) if args.env else {}
    try:
        r, used = eval_anf(env, e, args.budget)
    except StuckError as exc:
        _emit(args, {"result": "stuck", "reason": str(exc)})
        return EXIT_COUNTEREXAMPLE
    _emit(args, {"result": "OOT" if r is OOT else render(r.value), "consumed": used})
    return EXIT_OK


def cmd_anf(args) -> int:
    ctors = _ctors(args)
    e = parse(_text(args.input), "source", ctors)
    xs = tuple(args.xs.split()) if args.xs else ()
    check_src(e, len(xs), ctors)
    out = anf_exp(e, xs, NameSupply(args.supply), ctors)
    pairs = {"program": render(plug(out.ctx, Halt(out.result)))}
    if args.decompose:
        pairs.update(context=render(out.ctx), result=out.result, supply_after=out.supply_after.next)
    _emit(args, pairs)
    return EXIT_OK


def cmd_cps(args) -> int:
    ctors = _ctors(args)
    e = parse(_text(args.input), "source", ctors)
    out = cps_program_output(e, ctors, NameSupply(args.supply))
    pairs = {"program": render(out.expr)}
    if args.admin_count:
        pairs["admin_count"] = out.admin_count
    _emit(args, pairs)
    return EXIT_OK


def cmd_spec_check(args) -> int:
    ctors = _ctors(args)
    e = parse(_text(args.source), "source", ctors)
    parts = parse_many(_text(args.judgment))
    if len(parts) != 2:
        raise ParseError("expected a context followed by a result variable", 1, 1)
    ctx = parse(parts[0], "context", ctors)
    result = parts[1]
    xs = tuple(args.xs.split()) if args.xs else ()
    verdict = check_judgment(JudgmentQuery(NameSupply(args.supply), e, xs, ctx, result), ctors)
    if isinstance(verdict, Accepted):
        s = verdict.supply_after
        _emit(args, {"verdict": "Accepted", "supply_next": s.next, "supply_used": sorted(s.used)})
        return EXIT_OK
    _emit(args, {"verdict": "Rejected", "reason": str(verdict.reason), "detail": verdict.detail})
    return EXIT_COUNTEREXAMPLE


def cmd_logrel_check(args) -> int:
    ctors = _ctors(args)
    left = parse(_text(args.left), "anf", ctors)
    right = parse(_text(args.right), "anf", ctors)
    lenv = parse(_text(args.left_env), "anf-env", ctors) if args.left_env else {}
    renv = parse(_text(args.right_env), "anf-env", ctors) if args.right_env else {}
    cfg = LogRelConfig(args.eval_budget, args.witness_budget, args.samples, args.seed, ctors)
    verdict = exp_rel_bounded(args.k, AnfConfig(lenv, left), AnfConfig(renv, right), cfg)
    if verdict:
        _emit(args, {"verdict": "HoldsUpToBounds", "k": args.k})
        return EXIT_OK
    _emit(args, {"verdict": "Fails", "k": args.k, "witness": verdict.witness})
    return EXIT_COUNTEREXAMPLE


def cmd_fuzz(args) -> int:
    ctors = _ctors(args)
    expect = "falsify" if args.expect_falsify else "hold"
    spec = harness.CampaignSpec(
        mode=args.mode,
        trials=args.trials,
        seed=args.seed,
        budget=args.budget,
        expect=expect,
        ctors=ctors,
        ctors_path=args.ctors,
        supply_a=args.supply_a,
        supply_b=args.supply_b,
        pass_=args.pass_,
        shrink=args.shrink,
        max_depth=args.max_depth,
    )
    if args.env and args.mode != "divergence":
        raise UsageError("--env is only meaningful with --mode divergence")

    def show(i, o):
        if args.json:
            print(json.dumps({"trial": i, **o.to_json()}))
        elif o.failed:
            print(f"FAIL\t{i}\t{o.reason}")

    if args.term:
        e = parse(_text(args.term), "source", ctors)
        env = parse(_text(args.env), "src-env", ctors) if args.env else ()
        try:
            check_src(e, len(env), ctors)
        except IllFormedError as exc:
            raise UsageError(f"ill-formed term: {exc}") from None
        report = harness.CampaignReport(spec.mode, spec.seed, spec.budget, expect=expect)
        outcome = harness.run_one(spec, e, tuple(env), spec.shrink != "none")
        report.trials = 1
        setattr(report, {"pass": "passes", "fail": "fails", "skip": "skips"}[str(outcome.status)], 1)
        report.first_failure = outcome if outcome.failed else None
        report.outcomes.append((0, outcome))
        show(0, outcome)
    else:
        report = harness.run_campaign(spec, on_outcome=show)

    summary = report.summary()
    if args.json:
        print(json.dumps(summary))
    else:
        for k, v in summary.items():
            if k not in ("summary", "first_failure"):
                print(f"{k}\t{v}")
        first = report.first_failure
        if first is not None:
            print(f"first_failure\t{first.reason}")
            for k, v in first.evidence.items():
                print(f"  {k}\t{v}")
            print(f"  shrunk\t{first.shrunk}")
            print(f"  replay\t{first.replay}")
    if args.figure:
        from .plotting import render_report_figure

        render_report_figure(report, args.figure)
    return EXIT_OK if report.met_expectation else EXIT_COUNTEREXAMPLE


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--ctors", metavar="FILE", help="constructor table (TAG ARITY per line)")
    common.add_argument("--ctors-inline", metavar="TABLE", help="table as 'TAG ARITY;TAG ARITY'")
    common.add_argument("--json", action="store_true", help="machine-readable output")

    p = argparse.ArgumentParser(prog="anfbench", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("parse", parents=[common], help="parse and re-render a term")
    sp.add_argument("input")
    sp.add_argument("--kind", default="source", choices=["source", "anf", "context", "src-value", "anf-value", "src-env", "anf-env"])
    sp.set_defaults(func=cmd_parse)

    sp = sub.add_parser("eval-src", parents=[common], help="evaluate a source term")
    sp.add_argument("input")
    sp.add_argument("--env", help="(values V...)")
    sp.add_argument("--budget", type=int, default=100_000)
    sp.set_defaults(func=cmd_eval_src)

    sp = sub.add_parser("eval-anf", parents=[common], help="evaluate an ANF term")
    sp.add_argument("input")
    sp.add_argument("--env", help="(env (X V)...)")
    sp.add_argument("--budget", type=int, default=100_000)
    sp.set_defaults(func=cmd_eval_anf)

    sp = sub.add_parser("anf", parents=[common], help="ANF-convert a source term")
    sp.add_argument("input")
    sp.add_argument("--supply", type=int, default=0, help="first fresh-name counter")
    sp.add_argument("--xs", help="names for free indices, innermost first")
    sp.add_argument("--decompose", action="store_true", help="also print the (C, r) pair")
    sp.set_defaults(func=cmd_anf)

    sp = sub.add_parser("cps", parents=[common], help="CPS-convert a closed source term")
    sp.add_argument("input")
    sp.add_argument("--supply", type=int, default=0)
    sp.add_argument("--admin-count", action="store_true")
    sp.set_defaults(func=cmd_cps)

    sp = sub.add_parser("spec-check", parents=[common], help="check an ANF judgment")
    sp.add_argument("source")
    sp.add_argument("judgment", help="a context followed by the result variable")
    sp.add_argument("--supply", type=int, default=0)
    sp.add_argument("--xs", help="de Bruijn name environment, innermost first")
    sp.set_defaults(func=cmd_spec_check)

    sp = sub.add_parser("logrel-check", parents=[common], help="bounded logical-relation check")
    sp.add_argument("left")
    sp.add_argument("right")
    sp.add_argument("--left-env")
    sp.add_argument("--right-env")
    sp.add_argument("--k", type=int, default=4)
    sp.add_argument("--eval-budget", type=int, default=10_000)
    sp.add_argument("--witness-budget", type=int, default=100_000)
    sp.add_argument("--samples", type=int, default=2)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_logrel_check)

    sp = sub.add_parser("fuzz", parents=[common], help="run a differential-testing campaign")
    sp.add_argument("--mode", required=True, choices=harness.MODES)
    sp.add_argument("--trials", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--budget", type=int, default=100_000)
    grp = sp.add_mutually_exclusive_group()
    grp.add_argument("--expect-falsify", action="store_true", help="success means a counterexample")
    grp.add_argument("--expect-hold", action="store_true", help="success means no counterexample (default)")
    sp.add_argument("--pass", dest="pass_", choices=["anf", "cps"], default="anf")
    sp.add_argument("--supply-a", type=int, default=0)
    sp.add_argument("--supply-b", type=int, default=1000)
    sp.add_argument("--shrink", choices=["first", "all", "none"], default="first")
    sp.add_argument("--max-depth", type=int, default=6)
    sp.add_argument("--term", help="replay a single trial on this source term")
    sp.add_argument("--env", help="(values V...) for an open --term (divergence only)")
    sp.add_argument("--figure", metavar="PNG", help="write a summary figure")
    sp.set_defaults(func=cmd_fuzz)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (ParseError, UsageError, IllFormedError) as exc:
        print(f"anfbench: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except harness.InvariantViolation as exc:
        print(f"anfbench: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except AnfBenchError as exc:
        print(f"anfbench: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
