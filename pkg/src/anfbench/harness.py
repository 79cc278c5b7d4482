"""Differential-testing trials and campaigns.

Four campaign families check, on generated programs, the four layers of the
correctness argument: refinement of whole programs, stability under a
change of name supply, agreement of the conversion with its relational
specification, and the fuel-monotonicity property whose failure shows that
the fuel-based divergence argument does not carry over to ANF.
"""

from __future__ import annotations

import enum
import re
import shlex
import time
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Any

from .anf import anf_exp, anf_program, translate_env, translate_val
from .anf_spec import Accepted, JudgmentQuery, check_judgment
from .cps import cps_exp, cps_program, cps_translate_val
from .eval_anf import eval_anf
from .eval_src import OOT, eval_src
from .logrel import AnfConfig, LogRelConfig, exp_rel_bounded, obs_rel
from .surface import render, render_ctor_table
from .syntax import (
    DEFAULT_CTORS,
    AClosV,
    AnfBenchError,
    ClosV,
    CtorTable,
    Halt,
    LetCon,
    LetFun,
    NameSupply,
    SrcExpr,
    StuckError,
    alpha_eq,
    free_vars_anf,
    plug,
)
from .testgen import GenConfig, gen_open, gen_src, shrink

MODES = ("refine", "refine-cps", "alpha", "spec", "divergence")


def target_budget(budget: int) -> int:
    return 16 * budget + 64


class Status(str, enum.Enum):
    PASS = "pass"
    FAIL = "fail"
    SKIP = "skip"

    def __str__(self):
        return self.value


@dataclass
class TrialOutcome:
    status: Status
    evidence: dict = field(default_factory=dict)
    reason: str = ""
    replay: str = ""
    shrunk: bool = False

    @property
    def failed(self) -> bool:
        return self.status is Status.FAIL

    def to_json(self) -> dict:
        out: dict[str, Any] = {"status": str(self.status)}
        if self.reason:
            out["reason"] = self.reason
        out["evidence"] = self.evidence
        if self.shrunk:
            out["shrunk"] = True
        if self.replay:
            out["replay"] = self.replay
        return out


def _pass(**ev) -> TrialOutcome:
    return TrialOutcome(Status.PASS, ev)


def _fail(reason: str, **ev) -> TrialOutcome:
    return TrialOutcome(Status.FAIL, ev, reason)


def _skip(reason: str, **ev) -> TrialOutcome:
    return TrialOutcome(Status.SKIP, ev, reason)


class InvariantViolation(AnfBenchError):
    """The harness itself misbehaved (not a counterexample)."""


# --------------------------------------------------------------------------
# single trials


def env_names(n: int) -> tuple[str, ...]:
    """Target names for a source environment: index 0 is ``x1``."""
    return tuple(f"x{i + 1}" for i in range(n))


def compile_open(e: SrcExpr, env_len: int, ctors: CtorTable, pass_: str = "anf"):
    """Compile a term with ``env_len`` free indices bound to ``x1..xn``."""
    xs = env_names(env_len)
    if pass_ == "anf":
        out = anf_exp(e, xs, NameSupply(), ctors)
        return plug(out.ctx, Halt(out.result))
    k, s = NameSupply().fresh()
    x, s = s.fresh()
    return LetFun(k, (x,), Halt(x), cps_exp(e, xs, k, s, ctors).expr)


def _brief(v) -> str:
    """Render a value for evidence, eliding closure environments.

    Target closures can capture long continuation chains, so printing them
    in full costs more than the trial itself.
    """
    if isinstance(v, (ClosV, AClosV)):
        return "<closure>"
    tag, args = v.tag, v.fields
    return render(v) if not args else f"(conv {tag} {' '.join(_brief(a) for a in args)})"


def run_refine_trial(
    e: SrcExpr,
    budget: int,
    ctors: CtorTable = DEFAULT_CTORS,
    pass_: str = "anf",
    transform: Callable | None = None,
) -> TrialOutcome:
    """Whole-program refinement: a terminating source run is matched by the target."""
    if transform is None:
        transform = anf_program if pass_ == "anf" else cps_program
    ev: dict[str, Any] = {"source": render(e), "budget": budget, "pass": pass_}
    try:
        r, used = eval_src((), e, budget, ctors)
    except StuckError as exc:
        return _fail(f"source stuck: {exc}", **ev)
    if r is OOT:
        return _skip("source out of fuel", **ev)
    ev.update(src_value=_brief(r.value), src_fuel=used)
    prog = transform(e, ctors)
    ev["target"] = render(prog)
    tb = target_budget(budget)
    try:
        r2, used2 = eval_anf({}, prog, tb)
    except StuckError as exc:
        return _fail(f"target stuck: {exc}", **ev)
    if r2 is OOT:
        return _fail(f"target out of fuel at {tb}", **ev)
    ev.update(trg_value=_brief(r2.value), trg_fuel=used2)
    if not obs_rel(r.value, r2.value):
        return _fail("values not related by the observation relation", **ev)
    return _pass(**ev)


def run_divergence_trial(
    e: SrcExpr,
    budget: int,
    ctors: CtorTable = DEFAULT_CTORS,
    env: tuple = (),
    pass_: str = "anf",
) -> TrialOutcome:
    """Check ``consumed_trg >= consumed_src`` on a terminating run.

    This is what the fuel-based divergence-preservation argument needs; a
    Fail is a counterexample to it.
    """
    env = tuple(env)
    ev: dict[str, Any] = {"source": render(e), "env": render(env), "budget": budget, "pass": pass_}
    try:
        r, used = eval_src(env, e, budget, ctors)
    except StuckError as exc:
        return _fail(f"source stuck: {exc}", **ev)
    if r is OOT:
        return _skip("source out of fuel", **ev)
    val_fn = translate_val if pass_ == "anf" else cps_translate_val
    sigma, _ = translate_env(env_names(len(env)), env, NameSupply(0, "w"), ctors, val_fn)
    prog = compile_open(e, len(env), ctors, pass_)
    ev["target"] = render(prog)
    try:
        r2, used2 = eval_anf(sigma, prog, target_budget(budget))
    except StuckError as exc:
        return _fail(f"target stuck: {exc}", **ev)
    if r2 is OOT:
        return _fail("target out of fuel", **ev)
    ev.update(consumed_src=used, consumed_trg=used2)
    if used2 < used:
        return _fail(f"target used {used2} < source {used} fuel", **ev)
    return _pass(**ev)


def run_alpha_trial(
    e: SrcExpr,
    s1: NameSupply,
    s2: NameSupply,
    ctors: CtorTable = DEFAULT_CTORS,
    transform: Callable = anf_program,
) -> TrialOutcome:
    p1 = transform(e, ctors, s1)
    p2 = transform(e, ctors, s2)
    ev = {"source": render(e), "supply_a": s1.next, "supply_b": s2.next}
    if alpha_eq(p1, p2):
        return _pass(**ev)
    return _fail("outputs are not alpha-equivalent", target_a=render(p1), target_b=render(p2), **ev)


def run_spec_trial(
    e: SrcExpr,
    s: NameSupply,
    ctors: CtorTable = DEFAULT_CTORS,
    transform: Callable = anf_exp,
) -> TrialOutcome:
    out = transform(e, (), s, ctors)
    verdict = check_judgment(JudgmentQuery(s, e, (), out.ctx, out.result), ctors)
    ev = {"source": render(e), "context": render(out.ctx), "result": out.result, "supply": s.next}
    if isinstance(verdict, Accepted):
        if verdict.supply_after != out.supply_after:
            return _fail(
                "accepted with a different output supply",
                checker_next=verdict.supply_after.next,
                transform_next=out.supply_after.next,
                **ev,
            )
        return _pass(**ev)
    return _fail(f"rejected: {verdict.reason}: {verdict.detail}", **ev)


def run_theorem_trial(
    e: SrcExpr,
    env: tuple,
    ctors: CtorTable = DEFAULT_CTORS,
    k: int = 2,
    cfg: LogRelConfig | None = None,
    budget: int = 100_000,
) -> TrialOutcome:
    """Bounded instance of the main simulation statement.

    For continuations ``e_k`` that avoid the names the conversion consumed
    (other than its result), running ``e_k`` with the result bound to the
    translated source value is related to running ``C[e_k]``.
    """
    cfg = cfg or LogRelConfig(ctors=ctors)
    env = tuple(env)
    r, _ = eval_src(env, e, budget, ctors)
    if r is OOT:
        return _skip("source out of fuel", source=render(e))
    xs = env_names(len(env))
    sigma, ws = translate_env(xs, env, NameSupply(0, "w"), ctors)
    s = NameSupply()
    out = anf_exp(e, xs, s, ctors)
    v_t, _ = translate_val(r.value, ws, ctors)
    x = out.result
    consumed = out.supply_after.consumed_since(s) - {x}
    conts = [Halt(x), LetCon("kz", "Box", (x,), Halt("kz"))] if "Box" in ctors else [Halt(x)]
    conts += [Halt(y) for y in xs[:2]]
    ev = {"source": render(e), "env": render(env), "context": render(out.ctx), "result": x}
    for ek in conts:
        if free_vars_anf(ek) & consumed:
            raise InvariantViolation("continuation mentions a consumed name")
        left = AnfConfig({**sigma, x: v_t}, ek)
        right = AnfConfig(sigma, plug(out.ctx, ek))
        for i in range(k + 1):
            verdict = exp_rel_bounded(i, left, right, cfg)
            if not verdict:
                return _fail(verdict.witness, continuation=render(ek), index=i, **ev)
    return _pass(**ev)


# --------------------------------------------------------------------------
# campaigns


@dataclass
class CampaignReport:
    mode: str
    seed: int
    budget: int
    trials: int = 0
    passes: int = 0
    fails: int = 0
    skips: int = 0
    first_failure: TrialOutcome | None = None
    wall_time: float = 0.0
    expect: str = "hold"
    outcomes: list = field(default_factory=list)  # (trial index, TrialOutcome)

    @property
    def met_expectation(self) -> bool:
        if self.expect == "falsify":
            return self.fails >= 1
        return self.fails == 0

    @property
    def pass_rate(self) -> float:
        denom = self.passes + self.fails
        return self.passes / denom if denom else 1.0

    def summary(self) -> dict:
        return {
            "summary": True,
            "mode": self.mode,
            "seed": self.seed,
            "budget": self.budget,
            "trials": self.trials,
            "passes": self.passes,
            "fails": self.fails,
            "skips": self.skips,
            "pass_rate": self.pass_rate,
            "expect": self.expect,
            "met_expectation": self.met_expectation,
            "wall_time": round(self.wall_time, 3),
            "first_failure": self.first_failure.to_json() if self.first_failure else None,
        }


@dataclass(frozen=True)
class CampaignSpec:
    mode: str
    trials: int = 100
    seed: int = 0
    budget: int = 100_000
    expect: str = "hold"
    ctors: CtorTable = field(default=DEFAULT_CTORS)
    ctors_path: str | None = None
    supply_a: int = 0
    supply_b: int = 1000
    pass_: str = "anf"
    shrink: str = "first"  # first | all | none
    max_depth: int = 6

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.expect not in ("hold", "falsify"):
            raise ValueError("expect must be 'hold' or 'falsify'")
        if self.shrink not in ("first", "all", "none"):
            raise ValueError("shrink must be first, all or none")

    @property
    def gen(self) -> GenConfig:
        return GenConfig(ctors=self.ctors, seed=self.seed, max_depth=self.max_depth)


def _trial_fn(spec: CampaignSpec, env: tuple) -> Callable[[SrcExpr], TrialOutcome]:
    c = spec.ctors
    if spec.mode == "refine":
        return lambda e: run_refine_trial(e, spec.budget, c, "anf")
    if spec.mode == "refine-cps":
        return lambda e: run_refine_trial(e, spec.budget, c, "cps")
    if spec.mode == "alpha":
        sa, sb = NameSupply(spec.supply_a), NameSupply(spec.supply_b)
        return lambda e: run_alpha_trial(e, sa, sb, c)
    if spec.mode == "spec":
        return lambda e: run_spec_trial(e, NameSupply(spec.supply_a), c)
    return lambda e: run_divergence_trial(e, spec.budget, c, env, spec.pass_)


def replay_command(spec: CampaignSpec, e: SrcExpr, env: tuple) -> str:
    args = ["anfbench", "fuzz", "--mode", spec.mode, "--budget", str(spec.budget)]
    if spec.mode == "alpha":
        args += ["--supply-a", str(spec.supply_a), "--supply-b", str(spec.supply_b)]
    if spec.mode == "spec" and spec.supply_a:
        args += ["--supply-a", str(spec.supply_a)]
    if spec.mode == "divergence":
        args += ["--pass", spec.pass_]
        if env:
            args += ["--env", render(env)]
    if spec.expect == "falsify":
        args.append("--expect-falsify")
    if spec.ctors_path:
        args += ["--ctors", spec.ctors_path]
    elif spec.ctors != DEFAULT_CTORS:
        args += ["--ctors-inline", render_ctor_table(spec.ctors).strip().replace("\n", ";")]
    args += ["--shrink", "none", "--term", render(e)]
    return shlex.join(args)


def failure_class(reason: str) -> str:
    """Reason with details and numbers erased, so shrinking keeps the bug class."""
    return re.sub(r"\d+", "N", reason.split(":")[0])


def run_one(spec: CampaignSpec, e: SrcExpr, env: tuple = (), shrink_it: bool = False) -> TrialOutcome:
    """Run one trial, optionally shrink a failure, and attach its replay command."""
    fn = _trial_fn(spec, env)
    outcome = fn(e)
    if outcome.failed and shrink_it:
        cls = failure_class(outcome.reason)

        def same_failure(t):
            o = fn(t)
            return o.failed and failure_class(o.reason) == cls

        small = shrink(e, same_failure, spec.ctors, depth=len(env))
        if small != e:
            e = small
            outcome = fn(e)
            outcome.shrunk = True
    if outcome.failed:
        outcome.replay = replay_command(spec, e, env)
    return outcome


def _draw(spec: CampaignSpec, i: int) -> tuple[tuple, SrcExpr]:
    if spec.mode == "divergence" and i % 2 == 1:
        return gen_open(spec.gen, i)
    return (), gen_src(spec.gen, i)


def run_campaign(spec: CampaignSpec, on_outcome: Callable | None = None) -> CampaignReport:
    report = CampaignReport(spec.mode, spec.seed, spec.budget, expect=spec.expect)
    start = time.perf_counter()
    for i in range(spec.trials):
        env, e = _draw(spec, i)
        want_shrink = spec.shrink == "all" or (spec.shrink == "first" and report.fails == 0)
        try:
            outcome = run_one(spec, e, env, want_shrink)
        except AnfBenchError as exc:
            raise InvariantViolation(f"trial {i}: {type(exc).__name__}: {exc}") from exc
        report.trials += 1
        if outcome.status is Status.PASS:
            report.passes += 1
        elif outcome.status is Status.FAIL:
            report.fails += 1
            if report.first_failure is None:
                report.first_failure = outcome
        else:
            report.skips += 1
        report.outcomes.append((i, outcome))
        if on_outcome is not None:
            on_outcome(i, outcome)
    report.wall_time = time.perf_counter() - start
    if report.trials != report.passes + report.fails + report.skips:
        raise InvariantViolation("trial counts do not add up")
    return report
