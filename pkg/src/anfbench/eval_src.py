"""Fuel-instrumented big-step evaluation for the de Bruijn source language.

Every rule charges one unit of fuel at its root before doing anything else.
The derivation is run on an explicit continuation stack so that deep
evaluations do not exhaust the Python stack; the fuel charged is identical
to the recursive reading of the rules.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from .syntax import (
    App,
    ClosV,
    Con,
    ConV,
    CtorTable,
    Fun,
    Let,
    Match,
    SrcExpr,
    SrcValue,
    StuckError,
    Var,
)


class _OOT:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "OOT"

    def __reduce__(self):
        return (_OOT, ())


OOT = _OOT()


@dataclass(frozen=True)
class Val:
    value: Any


EvalResult = Val | _OOT


class OutOfFuel(Exception):
    pass


class Fuel:
    """Mutable fuel tank; ``tick`` raises OutOfFuel when empty."""

    __slots__ = ("budget", "left")

    def __init__(self, budget: int):
        if budget < 0:
            raise ValueError("budget must be non-negative")
        self.budget = budget
        self.left = budget

    def tick(self):
        if self.left == 0:
            raise OutOfFuel
        self.left -= 1

    @property
    def consumed(self) -> int:
        return self.budget - self.left


# continuation frames
_LET, _APP_ARG, _APP_CALL, _CON, _MATCH = range(5)


def eval_src(
    env, e: SrcExpr, budget: int, ctors: CtorTable | None = None
) -> tuple[EvalResult, int]:
    """Evaluate ``e`` under ``env`` (index 0 = innermost) with ``budget`` fuel.

    Returns ``(Val(v), consumed)`` or ``(OOT, budget)``.  Raises StuckError
    when a non-closure is applied, a non-constructor is matched, no branch
    matches, or an index is unbound.
    """
    fuel = Fuel(budget)
    try:
        v = _run(tuple(env), e, fuel, ctors)
    except OutOfFuel:
        return OOT, budget
    return Val(v), fuel.consumed


def _run(env: tuple, e: SrcExpr, fuel: Fuel, ctors) -> SrcValue:
    stack: list = []
    while True:
        # ---- evaluate e in env
        fuel.tick()
        if isinstance(e, Var):
            if not 0 <= e.index < len(env):
                raise StuckError(f"unbound de Bruijn index {e.index}")
            v = env[e.index]
        elif isinstance(e, Fun):
            v = ClosV(env, e.body)
        elif isinstance(e, Let):
            stack.append((_LET, e.body, env))
            e = e.bound
            continue
        elif isinstance(e, App):
            stack.append((_APP_ARG, e.arg, env))
            e = e.fn
            continue
        elif isinstance(e, Con):
            if ctors is not None and ctors.arity(e.tag) != len(e.args):
                raise StuckError(f"arity mismatch for {e.tag}")
            if not e.args:
                v = ConV(e.tag, ())
            else:
                stack.append((_CON, e, 1, (), env))
                e = e.args[0]
                continue
        elif isinstance(e, Match):
            stack.append((_MATCH, e.branches, env))
            e = e.scrutinee
            continue
        else:
            raise StuckError(f"not a source expression: {e!r}")

        # ---- return v to the innermost pending frame
        while True:
            if not stack:
                return v
            frame = stack.pop()
            kind = frame[0]
            if kind == _LET:
                _, body, fenv = frame
                env = (v, *fenv)
                e = body
                break
            if kind == _APP_ARG:
                _, arg, fenv = frame
                stack.append((_APP_CALL, v))
                env = fenv
                e = arg
                break
            if kind == _APP_CALL:
                fn = frame[1]
                if not isinstance(fn, ClosV):
                    raise StuckError("application of a non-closure")
                env = (v, *fn.env)
                e = fn.body
                break
            if kind == _CON:
                _, con, i, done, fenv = frame
                done = (*done, v)
                if i == len(con.args):
                    v = ConV(con.tag, done)
                    continue
                stack.append((_CON, con, i + 1, done, fenv))
                env = fenv
                e = con.args[i]
                break
            # _MATCH
            _, branches, fenv = frame
            if not isinstance(v, ConV):
                raise StuckError("match on a non-constructor value")
            for tag, body in branches:
                if tag == v.tag:
                    break
            else:
                raise StuckError(f"no branch for {v.tag}")
            env = (*reversed(v.fields), *fenv)
            e = body
            break
