"""ANF conversion over an explicit fresh-name supply.

``anf_exp`` returns a context ``C`` and a result variable ``r`` such that
``C[halt r]`` is the converted program.  Names are drawn in a fixed order
(lambda: parameter then function; constructor: result before arguments;
application: result after both operands) so output is deterministic.

``match`` is compiled through a join point: the continuation is placed in
the body of a one-parameter local function that every branch tail-calls.
"""

from __future__ import annotations

from dataclasses import dataclass

from .syntax import (
    HOLE,
    AClosV,
    AConV,
    AnfExpr,
    AnfValue,
    App,
    ClosV,
    Con,
    ConV,
    Ctx,
    CtorTable,
    DuplicateNameError,
    Fun,
    Halt,
    IllFormedError,
    JoinFunC,
    Let,
    LetAppC,
    LetConC,
    LetFunC,
    Match,
    NameSupply,
    Proj,
    SrcExpr,
    SrcValue,
    TailCall,
    Case,
    Var,
    alpha_eq_val,
    check_src,
    compose,
    plug,
)


@dataclass(frozen=True)
class AnfOutput:
    ctx: Ctx
    result: str
    supply_after: NameSupply


def anf_exp(e: SrcExpr, xs, s: NameSupply, ctors: CtorTable) -> AnfOutput:
    """Convert ``e`` whose free index ``n`` names ``xs[n]``."""
    xs = tuple(xs)
    if isinstance(e, Var):
        if not 0 <= e.index < len(xs):
            raise IllFormedError(f"de Bruijn index {e.index} out of range")
        return AnfOutput(HOLE, xs[e.index], s)

    if isinstance(e, Fun):
        x1, s = s.fresh()
        f, s = s.fresh()
        body = anf_exp(e.body, (x1, *xs), s, ctors)
        code = plug(body.ctx, Halt(body.result))
        return AnfOutput(LetFunC(f, (x1,), code, HOLE), f, body.supply_after)

    if isinstance(e, App):
        o1 = anf_exp(e.fn, xs, s, ctors)
        o2 = anf_exp(e.arg, xs, o1.supply_after, ctors)
        r, s = o2.supply_after.fresh()
        call = LetAppC(r, o1.result, (o2.result,), HOLE)
        return AnfOutput(compose(o1.ctx, compose(o2.ctx, call)), r, s)

    if isinstance(e, Con):
        if ctors.arity(e.tag) != len(e.args):
            raise IllFormedError(f"{e.tag} expects {ctors.arity(e.tag)} arguments")
        z, s = s.fresh()
        c, ys, s = anf_exps(e.args, xs, s, ctors)
        return AnfOutput(compose(c, LetConC(z, e.tag, ys, HOLE)), z, s)

    if isinstance(e, Let):
        o1 = anf_exp(e.bound, xs, s, ctors)
        o2 = anf_exp(e.body, (o1.result, *xs), o1.supply_after, ctors)
        return AnfOutput(compose(o1.ctx, o2.ctx), o2.result, o2.supply_after)

    if isinstance(e, Match):
        scrut = anf_exp(e.scrutinee, xs, s, ctors)
        y = scrut.result
        j, s = scrut.supply_after.fresh()
        xr, s = s.fresh()
        branches = []
        seen = set()
        for tag, body in e.branches:
            if tag in seen:
                raise IllFormedError(f"duplicate branch for {tag}")
            seen.add(tag)
            arity = ctors.arity(tag)
            zs, s = s.fresh_many(arity)
            # the last field is innermost (index 0)
            ob = anf_exp(body, (*reversed(zs), *xs), s, ctors)
            s = ob.supply_after
            code = plug(ob.ctx, TailCall(j, (ob.result,)))
            for i in reversed(range(arity)):
                code = Proj(zs[i], y, i, code)
            branches.append((tag, code))
        join = JoinFunC(j, xr, HOLE, Case(y, tuple(branches)))
        return AnfOutput(compose(scrut.ctx, join), xr, s)

    raise IllFormedError(f"not a source expression: {e!r}")


def anf_exps(es, xs, s: NameSupply, ctors: CtorTable) -> tuple[Ctx, tuple, NameSupply]:
    """Convert a sequence left to right, composing contexts in order."""
    ctx: Ctx = HOLE
    ys = []
    for e in es:
        o = anf_exp(e, xs, s, ctors)
        ctx = compose(ctx, o.ctx)
        ys.append(o.result)
        s = o.supply_after
    return ctx, tuple(ys), s


def anf_program(e: SrcExpr, ctors: CtorTable, s: NameSupply | None = None) -> AnfExpr:
    """Whole-program conversion ``C[halt r]`` of a closed term."""
    s = NameSupply() if s is None else s
    check_src(e, 0, ctors)
    out = anf_exp(e, (), s, ctors)
    return plug(out.ctx, Halt(out.result))


# --------------------------------------------------------------------------
# values and environments


def translate_val(v: SrcValue, s: NameSupply, ctors: CtorTable) -> tuple[AnfValue, NameSupply]:
    """One witness of the value translation relation.

    Closures become ``letfun f (x) = body`` closures whose environment binds
    one fresh name per captured source value.
    """
    if isinstance(v, ConV):
        if ctors.arity(v.tag) != len(v.fields):
            raise IllFormedError(f"{v.tag} expects {ctors.arity(v.tag)} fields")
        fields = []
        for fv in v.fields:
            tv, s = translate_val(fv, s, ctors)
            fields.append(tv)
        return AConV(v.tag, tuple(fields)), s
    if isinstance(v, ClosV):
        x, s = s.fresh()
        f, s = s.fresh()
        names, s = s.fresh_many(len(v.env))
        env = {}
        for name, cv in zip(names, v.env):
            env[name], s = translate_val(cv, s, ctors)
        body = anf_exp(v.body, (x, *names), s, ctors)
        code = plug(body.ctx, Halt(body.result))
        return AClosV(env, f, (x,), code), body.supply_after
    raise TypeError(f"not a source value: {v!r}")


def translate_env(xs, vs, s: NameSupply, ctors: CtorTable, translate=None) -> tuple[dict, NameSupply]:
    """Build ``sigma`` with ``sigma[xs[i]] = translate_val(vs[i])``.

    Repeated names are accepted only when their translations are
    alpha-equivalent.  ``translate`` swaps in another value translation
    (the CPS one, say).
    """
    translate = translate or translate_val
    xs, vs = tuple(xs), tuple(vs)
    if len(xs) != len(vs):
        raise ValueError(f"{len(xs)} names for {len(vs)} values")
    env: dict = {}
    for x, v in zip(xs, vs):
        tv, s = translate(v, s, ctors)
        if x in env and not alpha_eq_val(env[x], tv):
            raise DuplicateNameError(f"{x} is bound to two unrelated values")
        env[x] = tv
    return env, s
