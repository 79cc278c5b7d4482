"""Fuel-instrumented big-step evaluation for ANF terms.

Cost model: one unit per rule, charged before the rule does its work.  A
non-tail call (``letapp``) pushes a return frame; tail calls reuse the
current one, so both are evaluated without Python recursion.
"""

from __future__ import annotations

from collections.abc import Mapping

from .eval_src import OOT, EvalResult, Fuel, OutOfFuel, Val
from .syntax import (
    AClosV,
    AConV,
    AnfExpr,
    AnfValue,
    Case,
    Halt,
    LetApp,
    LetCon,
    LetFun,
    Proj,
    StuckError,
    TailCall,
)


def eval_anf(env: Mapping[str, AnfValue], e: AnfExpr, budget: int) -> tuple[EvalResult, int]:
    """Evaluate ``e`` under ``env``; returns ``(Val(v), consumed)`` or ``(OOT, budget)``."""
    fuel = Fuel(budget)
    try:
        v = _run(dict(env), e, fuel)
    except OutOfFuel:
        return OOT, budget
    return Val(v), fuel.consumed


def _lookup(env: dict, x: str) -> AnfValue:
    try:
        return env[x]
    except KeyError:
        raise StuckError(f"unbound variable {x}") from None


def _enter(env: dict, f: str, ys) -> tuple[dict, AnfExpr]:
    clo = _lookup(env, f)
    if not isinstance(clo, AClosV):
        raise StuckError(f"call of non-closure {f}")
    if len(clo.params) != len(ys):
        raise StuckError(f"arity mismatch calling {f}")
    args = [_lookup(env, y) for y in ys]
    new = dict(clo.env)
    new.update(zip(clo.params, args))
    new[clo.f] = clo
    return new, clo.body


def _run(env: dict, e: AnfExpr, fuel: Fuel) -> AnfValue:
    frames: list[tuple[str, AnfExpr, dict]] = []
    while True:
        fuel.tick()
        if isinstance(e, LetCon):
            env = {**env, e.x: AConV(e.tag, tuple(_lookup(env, y) for y in e.ys))}
            e = e.cont
        elif isinstance(e, Proj):
            v = _lookup(env, e.y)
            if not isinstance(v, AConV):
                raise StuckError(f"projection from non-constructor {e.y}")
            if not 0 <= e.index < len(v.fields):
                raise StuckError(f"field {e.index} out of range for {v.tag}")
            env = {**env, e.x: v.fields[e.index]}
            e = e.cont
        elif isinstance(e, LetFun):
            env = {**env, e.f: AClosV(env, e.f, e.params, e.fbody)}
            e = e.cont
        elif isinstance(e, LetApp):
            frames.append((e.x, e.cont, env))
            env, e = _enter(env, e.f, e.ys)
        elif isinstance(e, TailCall):
            env, e = _enter(env, e.f, e.ys)
        elif isinstance(e, Case):
            v = _lookup(env, e.y)
            if not isinstance(v, AConV):
                raise StuckError(f"case on non-constructor {e.y}")
            for tag, branch in e.branches:
                if tag == v.tag:
                    e = branch
                    break
            else:
                raise StuckError(f"no branch for {v.tag}")
        elif isinstance(e, Halt):
            v = _lookup(env, e.x)
            if not frames:
                return v
            x, e, env = frames.pop()
            env = {**env, x: v}
        else:
            raise StuckError(f"not an ANF expression: {e!r}")
